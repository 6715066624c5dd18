from typing import Dict, List, Optional, Sequence

import numpy as np

from components.data.standardizer import standardize_apply, standardize_fit, unit_normalize
from components.scoring.container import matrix_bytes, matrix_from
from entities.entity_detector import Preprocessing
from entities.entity_exception import InvalidArgumentError
from entities.entity_features import StandardizationStats


def check_scales(samples: Sequence[np.ndarray], n_scales: Optional[int] = None) -> List[np.ndarray]:
    """One 2-D float matrix per scale, all with the same number of rows."""
    samples = [np.atleast_2d(np.asarray(s, dtype=np.float64)) for s in samples]
    if not samples:
        raise InvalidArgumentError("At least one feature scale is required")
    if n_scales is not None and len(samples) != n_scales:
        raise InvalidArgumentError(f"Detector has {n_scales} scales but {len(samples)} were given",
                                   expected=n_scales, given=len(samples))
    rows = {s.shape[0] for s in samples}
    if len(rows) != 1:
        raise InvalidArgumentError(f"Feature scales disagree on the row count: {sorted(rows)}")
    return samples


def fit_preprocessing(samples: Sequence[np.ndarray], standardize: bool, unit_norm_last: bool) -> Preprocessing:
    stats: List[Optional[StandardizationStats]] = []
    for idx, X in enumerate(samples):
        if unit_norm_last and idx == len(samples) - 1:
            X = unit_normalize(X)
        stats.append(standardize_fit(X) if standardize else None)
    return Preprocessing(stats=stats, unit_norm_last=unit_norm_last)


def apply_preprocessing(prep: Preprocessing, samples: Sequence[np.ndarray]) -> List[np.ndarray]:
    samples = check_scales(samples, len(prep.stats))
    out = []
    for idx, (X, stats) in enumerate(zip(samples, prep.stats)):
        if prep.unit_norm_last and idx == len(samples) - 1:
            X = unit_normalize(X)
        if stats is not None:
            X = standardize_apply(stats, X)
        out.append(X)
    return out


def preprocessing_entries(prep: Preprocessing) -> Dict[str, bytes]:
    return {
        f"scale_{idx}/stats.bin": matrix_bytes(np.vstack([stats.mean, stats.scale]))
        for idx, stats in enumerate(prep.stats) if stats is not None
    }


def preprocessing_from(header: dict, entries: Dict[str, bytes]) -> Preprocessing:
    stats: List[Optional[StandardizationStats]] = []
    for idx in range(header["n_scales"]):
        name = f"scale_{idx}/stats.bin"
        if name in entries:
            values = matrix_from(entries, name)
            stats.append(StandardizationStats(mean=values[0].copy(), scale=values[1].copy()))
        else:
            stats.append(None)
    return Preprocessing(stats=stats, unit_norm_last=bool(header.get("unit_norm_last", False)))
