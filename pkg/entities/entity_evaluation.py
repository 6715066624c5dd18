from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np


@dataclass
class LandscapeGrid:
    xs: np.ndarray
    ys: np.ndarray
    loss: np.ndarray
    auc: np.ndarray
    center_loss: float
    center_auc: float

    @property
    def n_cells(self) -> int:
        return self.loss.size

    def rows(self):
        for i, x in enumerate(self.xs):
            for j, y in enumerate(self.ys):
                yield float(x), float(y), float(self.loss[i, j]), float(self.auc[i, j])


@dataclass
class SeedResult:
    seed: int
    auc: float
    model_hash: str


@dataclass
class BenchmarkReport:
    config: Dict[str, Any]
    per_seed: List[SeedResult] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def aucs(self) -> np.ndarray:
        return np.array([result.auc for result in self.per_seed], dtype=np.float64)

    @property
    def mean(self) -> Optional[float]:
        return float(self.aucs.mean()) if self.per_seed else None

    @property
    def std(self) -> Optional[float]:
        return float(self.aucs.std()) if self.per_seed else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "per_seed": [{"seed": r.seed, "auc": r.auc} for r in self.per_seed],
            "mean": self.mean,
            "std": self.std,
            "wall_time_s": self.wall_time_s,
            "model_hashes": [r.model_hash for r in self.per_seed],
        }


@dataclass
class BenchmarkJob:
    """One seed travelling through the train, score and evaluate stages."""
    seed: int
    split: Any
    detector_config: Any
    score: Any
    detector: Any = None
    model_hash: Optional[str] = None
    scores: Optional[np.ndarray] = None
    auc: Optional[float] = None

    def result(self) -> SeedResult:
        return SeedResult(seed=self.seed, auc=self.auc, model_hash=self.model_hash)
