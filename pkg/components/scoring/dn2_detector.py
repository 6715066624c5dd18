from typing import Any, Dict, List, Sequence, Tuple, Union

import numpy as np

from components.scoring.abstract_detector import AbstractDetector
from components.scoring.container import matrix_bytes, matrix_from
from components.scoring.knn_index import nearest_neighbours
from components.scoring.preprocessing import check_scales
from constants.constants_enum import ScoreKind
from entities.entity_detector import Dn2Model
from entities.entity_exception import InvalidArgumentError


def dn2_score(model: Dn2Model, sample: Union[np.ndarray, Sequence[np.ndarray]]) -> Union[float, np.ndarray]:
    """Mean distance to the k nearest training rows, summed over scales."""
    if isinstance(sample, np.ndarray) and len(model.features) == 1:
        sample = [sample]
    sample = list(sample)
    single = all(np.ndim(s) == 1 for s in sample)
    scales = check_scales(sample, len(model.features))
    total = 0.0
    for X, train in zip(scales, model.features):
        if model.k >= train.shape[0]:
            raise InvalidArgumentError(f"DN2 needs k < N, got k={model.k} for N={train.shape[0]}")
        dists, _ = nearest_neighbours(train, X, model.k)
        total = total + dists.mean(axis=1)
    return float(total[0]) if single else total


class Dn2Detector(AbstractDetector):
    """DN2: average distance to the k nearest training features."""

    def __init__(self, config):
        super().__init__(config)
        self.model: Dn2Model = None

    def _fit(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> None:
        for X in prepared:
            if self.config.dn2_k >= X.shape[0]:
                raise InvalidArgumentError(f"DN2 needs k < N, got k={self.config.dn2_k} for N={X.shape[0]}")
        self.model = Dn2Model(features=[X.copy() for X in prepared], k=self.config.dn2_k)

    def _score(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> Dict[str, np.ndarray]:
        return {ScoreKind.S_DN2.value: dn2_score(self.model, prepared)}

    def _entries(self) -> Tuple[Dict[str, Any], Dict[str, bytes]]:
        entries = {f"scale_{idx}/features.bin": matrix_bytes(X) for idx, X in enumerate(self.model.features)}
        return {"k": self.model.k}, entries

    @classmethod
    def from_entries(cls, config, header, entries) -> "Dn2Detector":
        detector = cls(config)
        features = [matrix_from(entries, f"scale_{idx}/features.bin").copy() for idx in range(header["n_scales"])]
        detector.model = Dn2Model(features=features, k=int(header["k"]))
        return detector
