from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np
import torch.nn as nn

from constants.constants_enum import InvariantKind
from entities.entity_features import StandardizationStats


@dataclass
class TrainedScale:
    model: nn.Module
    kind: InvariantKind
    k: int
    errors: np.ndarray
    feature_store: np.ndarray
    history: List[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.feature_store.shape[1]


@dataclass
class KnnIndex:
    features: List[np.ndarray]
    loo_means: List[float]
    ks: List[int]

    @property
    def n_scales(self) -> int:
        return len(self.features)


@dataclass
class InvariantDetector:
    scales: List[TrainedScale]
    knn: Optional[KnnIndex] = None

    @property
    def n_scales(self) -> int:
        return len(self.scales)

    @property
    def ks(self) -> List[int]:
        return [scale.k for scale in self.scales]


@dataclass
class MahaModel:
    means: List[np.ndarray]
    eigenvalues: List[np.ndarray]
    eigenvectors: List[np.ndarray]


@dataclass
class Dn2Model:
    features: List[np.ndarray]
    k: int


@dataclass
class Preprocessing:
    stats: List[Optional[StandardizationStats]]
    unit_norm_last: bool = False


@dataclass
class ScoreReport:
    scores: Dict[str, np.ndarray]
    model_hash: str
    config: dict

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.scores.values())))

    def column(self, name: str) -> np.ndarray:
        return self.scores[name]
