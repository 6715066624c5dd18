from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from entities.entity_exception import InvalidArgumentError


@dataclass
class FeatureMatrix:
    data: np.ndarray
    labels: Optional[np.ndarray] = None
    columns: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise InvalidArgumentError(f"Feature matrix must be 2-D, got shape {self.data.shape}")
        if not self.columns:
            self.columns = [f"f{i}" for i in range(self.data.shape[1])]
        if len(self.columns) != self.data.shape[1]:
            raise InvalidArgumentError(
                f"{len(self.columns)} column names for {self.data.shape[1]} columns")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.uint8)
            if self.labels.shape != (self.data.shape[0],):
                raise InvalidArgumentError(
                    f"Label vector of length {self.labels.shape} for {self.data.shape[0]} rows")
            if np.any(self.labels > 1):
                raise InvalidArgumentError("Labels must be 0 (in-distribution) or 1 (OOD)")

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def take(self, index: np.ndarray) -> "FeatureMatrix":
        labels = None if self.labels is None else self.labels[index]
        return FeatureMatrix(self.data[index], labels, list(self.columns))

    def without_labels(self) -> "FeatureMatrix":
        return FeatureMatrix(self.data, None, list(self.columns))


@dataclass
class ShallowSplit:
    train: FeatureMatrix
    test: FeatureMatrix
    train_index: Optional[np.ndarray]
    test_index: Optional[np.ndarray]
    # scales after the first, row-aligned with train / test
    extra_train: List[FeatureMatrix] = field(default_factory=list)
    extra_test: List[FeatureMatrix] = field(default_factory=list)

    @property
    def train_scales(self) -> List[np.ndarray]:
        return [self.train.data] + [m.data for m in self.extra_train]

    @property
    def test_scales(self) -> List[np.ndarray]:
        return [self.test.data] + [m.data for m in self.extra_test]


@dataclass
class StandardizationStats:
    mean: np.ndarray
    scale: np.ndarray
