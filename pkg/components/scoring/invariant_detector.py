import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from joblib import Parallel, delayed

from components.scoring.abstract_detector import AbstractDetector
from components.scoring.container import matrix_bytes, matrix_from
from components.scoring.knn_index import build_knn_index, s_2nn
from components.scoring.preprocessing import check_scales
from components.training import fit_affine_scale, train_scale
from constants.constants_enum import InvariantKind, Method, ScoreKind
from entities.entity_config import DetectorConfig
from entities.entity_detector import InvariantDetector, KnnIndex, TrainedScale
from entities.entity_exception import DataFormatError, InvalidArgumentError
from models.vpn import AffineInvariantModel, deserialize, serialize
from utils.common import resolve_threads

logger = logging.getLogger(__name__)

Sample = Union[np.ndarray, Sequence[np.ndarray]]


def _rows(f: np.ndarray, dim: int) -> np.ndarray:
    F = np.atleast_2d(np.asarray(f, dtype=np.float64))
    if F.shape[-1] != dim:
        raise InvalidArgumentError(f"Expected {dim} features, got {F.shape[-1]}")
    return F


def _per_scale(sample: Sample, n_scales: int) -> Tuple[List[np.ndarray], bool]:
    if isinstance(sample, np.ndarray) and sample.ndim <= 2 and n_scales == 1:
        sample = [sample]
    sample = list(sample)
    single = all(np.ndim(s) == 1 for s in sample)
    return check_scales(sample, n_scales), single


def invariant_score_scale(ts: TrainedScale, f: np.ndarray) -> Union[float, np.ndarray]:
    """sum_k g_k(f)^2 / e_k over the K invariants of one scale."""
    F = _rows(f, ts.dim)
    with torch.no_grad():
        z = ts.model(torch.from_numpy(F))[:, :ts.k].numpy()
    scores = (z ** 2 / ts.errors).sum(axis=1)
    return float(scores[0]) if np.ndim(f) == 1 else scores


def invariant_score(det: InvariantDetector, sample: Sample) -> Union[float, np.ndarray]:
    """S_inv: per-scale invariant scores summed."""
    scales, single = _per_scale(sample, det.n_scales)
    total = sum(invariant_score_scale(ts, X) for ts, X in zip(det.scales, scales))
    return float(total[0]) if single else total


def two_nn_score(index: KnnIndex, sample: Sample) -> Union[float, np.ndarray]:
    """S_2nn: normalised 2-NN scores summed over scales."""
    scales, single = _per_scale(sample, index.n_scales)
    total = sum(s_2nn(index, idx, X) for idx, X in enumerate(scales))
    return float(total[0]) if single else total


def final_score(det: InvariantDetector, index: KnnIndex, sample: Sample):
    """(S_inv, S_2nn, S_final) with S_final = S_inv + S_2nn."""
    s_inv = invariant_score(det, sample)
    s_nn = two_nn_score(index, sample)
    return s_inv, s_nn, s_inv + s_nn


class NlInvDetector(AbstractDetector):
    """Invariant detector: learned VPN invariants, or PCA invariants for ``linear-invariants``."""

    def __init__(self, config: DetectorConfig, progress: bool = False):
        super().__init__(config)
        if not config.method.is_invariant:
            raise InvalidArgumentError(f"{config.method.value} is not an invariant method")
        self.progress = progress
        self.detector: Optional[InvariantDetector] = None

    def _fit_scale(self, X: np.ndarray) -> TrainedScale:
        if self.method is Method.LINEAR_INVARIANTS:
            return fit_affine_scale(X, self.config.scale)
        return train_scale(X, self.config.scale, progress=self.progress)

    def _fit(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> None:
        if len(prepared) == 1:
            scales = [self._fit_scale(prepared[0])]
        else:
            scales = Parallel(n_jobs=min(resolve_threads(), len(prepared)), prefer="threads")(
                delayed(self._fit_scale)(X) for X in prepared
            )
        self.detector = InvariantDetector(scales=list(scales))
        logger.info(f"Fitted {self.method.value} detector: K per scale {self.detector.ks}")
        if ScoreKind.S_2NN in kinds or ScoreKind.S_FINAL in kinds:
            self.knn_index()

    def knn_index(self) -> KnnIndex:
        if self.detector.knn is None:
            self.detector.knn = build_knn_index([ts.feature_store for ts in self.detector.scales], self.detector.ks)
        return self.detector.knn

    def _score(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> Dict[str, np.ndarray]:
        scores: Dict[str, np.ndarray] = {}
        if ScoreKind.S_INV in kinds or ScoreKind.S_FINAL in kinds:
            scores[ScoreKind.S_INV.value] = invariant_score(self.detector, prepared)
        if ScoreKind.S_2NN in kinds or ScoreKind.S_FINAL in kinds:
            scores[ScoreKind.S_2NN.value] = two_nn_score(self.knn_index(), prepared)
        if ScoreKind.S_FINAL in kinds:
            scores[ScoreKind.S_FINAL.value] = scores[ScoreKind.S_INV.value] + scores[ScoreKind.S_2NN.value]
        return scores

    def _entries(self) -> Tuple[Dict[str, Any], Dict[str, bytes]]:
        entries: Dict[str, bytes] = {}
        for idx, ts in enumerate(self.detector.scales):
            prefix = f"scale_{idx}"
            if ts.kind is InvariantKind.VPN:
                entries[f"{prefix}/model.bin"] = serialize(ts.model, ts.k)
            else:
                entries[f"{prefix}/affine.bin"] = matrix_bytes(
                    np.vstack([ts.model.rotation.numpy(), ts.model.mean.numpy()]))
            entries[f"{prefix}/errors.bin"] = matrix_bytes(ts.errors)
            entries[f"{prefix}/features.bin"] = matrix_bytes(ts.feature_store)
        knn = self.detector.knn
        header = {
            "scales": [{"kind": ts.kind.value, "k": ts.k, "dim": ts.dim, "history": ts.history}
                       for ts in self.detector.scales],
            "loo_means": None if knn is None else knn.loo_means,
        }
        return header, entries

    @classmethod
    def from_entries(cls, config, header, entries) -> "NlInvDetector":
        detector = cls(config)
        scales = []
        for idx, meta in enumerate(header["scales"]):
            prefix = f"scale_{idx}"
            kind = InvariantKind(meta["kind"])
            if kind is InvariantKind.VPN:
                if f"{prefix}/model.bin" not in entries:
                    raise DataFormatError(f"Detector file has no entry {prefix}/model.bin")
                model, k = deserialize(entries[f"{prefix}/model.bin"])
                if k != meta["k"]:
                    raise DataFormatError(f"Scale {idx}: model K={k} but header K={meta['k']}")
            else:
                values = matrix_from(entries, f"{prefix}/affine.bin")
                model = AffineInvariantModel(values[-1], values[:-1])
            model.eval()
            errors = matrix_from(entries, f"{prefix}/errors.bin").ravel().copy()
            features = matrix_from(entries, f"{prefix}/features.bin").copy()
            scales.append(TrainedScale(model=model, kind=kind, k=meta["k"], errors=errors,
                                       feature_store=features, history=list(meta.get("history", []))))
        detector.detector = InvariantDetector(scales=scales)
        if header.get("loo_means") is not None:
            detector.detector.knn = KnnIndex(features=[ts.feature_store for ts in scales],
                                             loo_means=list(header["loo_means"]), ks=detector.detector.ks)
        return detector
