from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from components.autodiff import pca_eig
from components.scoring.abstract_detector import AbstractDetector
from components.scoring.container import matrix_bytes, matrix_from
from components.scoring.preprocessing import check_scales
from constants.constants_enum import ScoreKind
from constants.constants_value import EIGENVALUE_FLOOR
from entities.entity_detector import MahaModel
from entities.entity_exception import InvalidArgumentError


def fit_maha(samples: Sequence[np.ndarray]) -> MahaModel:
    means, eigenvalues, eigenvectors = [], [], []
    for X in samples:
        mean, eigs, vecs = pca_eig(X)
        means.append(mean)
        eigenvalues.append(eigs)
        eigenvectors.append(vecs)
    return MahaModel(means=means, eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def maha_score(model: MahaModel, sample: Union[np.ndarray, Sequence[np.ndarray]]) -> Union[float, np.ndarray]:
    """Squared Mahalanobis distance per scale, summed over scales."""
    if isinstance(sample, np.ndarray) and len(model.means) == 1:
        sample = [sample]
    sample = list(sample)
    single = all(np.ndim(s) == 1 for s in sample)
    scales = check_scales(sample, len(model.means))
    total = 0.0
    for X, mean, eigs, vecs in zip(scales, model.means, model.eigenvalues, model.eigenvectors):
        if X.shape[1] != mean.shape[0]:
            raise InvalidArgumentError(f"Expected {mean.shape[0]} features, got {X.shape[1]}")
        projected = (X - mean) @ vecs
        total = total + (projected ** 2 / np.maximum(eigs, EIGENVALUE_FLOOR)).sum(axis=1)
    return float(total[0]) if single else total


class MahaDetector(AbstractDetector):
    """MahaAD: summed Mahalanobis distances over the feature scales."""

    def __init__(self, config):
        super().__init__(config)
        self.model: MahaModel = None

    def _fit(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> None:
        self.model = fit_maha(prepared)

    def _score(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> Dict[str, np.ndarray]:
        return {ScoreKind.S_MAHA.value: maha_score(self.model, prepared)}

    def _entries(self) -> Tuple[Dict[str, Any], Dict[str, bytes]]:
        entries = {
            f"scale_{idx}/maha.bin": matrix_bytes(np.vstack([mean, eigs, vecs]))
            for idx, (mean, eigs, vecs) in enumerate(
                zip(self.model.means, self.model.eigenvalues, self.model.eigenvectors))
        }
        return {"scales": [{"dim": int(mean.shape[0])} for mean in self.model.means]}, entries

    @classmethod
    def from_entries(cls, config, header, entries) -> "MahaDetector":
        detector = cls(config)
        means, eigenvalues, eigenvectors = [], [], []
        for idx in range(header["n_scales"]):
            values = matrix_from(entries, f"scale_{idx}/maha.bin")
            means.append(values[0].copy())
            eigenvalues.append(values[1].copy())
            eigenvectors.append(values[2:].copy())
        detector.model = MahaModel(means=means, eigenvalues=eigenvalues, eigenvectors=eigenvectors)
        return detector
