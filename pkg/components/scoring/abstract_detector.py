import hashlib
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from components.scoring.container import pack
from components.scoring.preprocessing import (
    apply_preprocessing, check_scales, fit_preprocessing, preprocessing_entries,
)
from constants.constants_enum import ScoreKind
from entities.entity_config import ALLOWED_SCORES, DetectorConfig
from entities.entity_detector import Preprocessing
from entities.entity_exception import InvalidArgumentError, InvalidConfigError

logger = logging.getLogger(__name__)


class AbstractDetector(ABC):
    """Feature-space OOD detector over one or more feature scales."""

    def __init__(self, config: DetectorConfig):
        self.config = config
        self.preprocessing: Optional[Preprocessing] = None

    @property
    def method(self):
        return self.config.method

    @property
    def is_fitted(self) -> bool:
        return self.preprocessing is not None

    @property
    def n_scales(self) -> int:
        self._require_fitted()
        return len(self.preprocessing.stats)

    def fit(self, samples: Sequence[np.ndarray], kinds: Optional[Iterable[ScoreKind]] = None) -> "AbstractDetector":
        samples = check_scales(samples)
        self.preprocessing = fit_preprocessing(samples, self.config.standardize, self.config.unit_norm_last)
        self._fit(apply_preprocessing(self.preprocessing, samples), self.resolve_kinds(kinds))
        return self

    def score(self, samples: Sequence[np.ndarray], kinds: Optional[Iterable[ScoreKind]] = None) -> Dict[str, np.ndarray]:
        self._require_fitted()
        prepared = apply_preprocessing(self.preprocessing, samples)
        return self._score(prepared, self.resolve_kinds(kinds))

    def resolve_kinds(self, kinds: Optional[Iterable[ScoreKind]]) -> List[ScoreKind]:
        allowed = ALLOWED_SCORES[self.method]
        if kinds is None:
            return list(allowed)
        kinds = list(kinds)
        for kind in kinds:
            if kind not in allowed:
                raise InvalidConfigError(f"Score {kind.value} is not defined for method {self.method.value}",
                                         allowed=[k.value for k in allowed])
        return kinds

    def to_bytes(self) -> bytes:
        self._require_fitted()
        header, entries = self._entries()
        header = {
            **header,
            "method": self.method.value,
            "config": self.config.to_dict(),
            "n_scales": self.n_scales,
            "unit_norm_last": self.preprocessing.unit_norm_last,
        }
        return pack(header, {**entries, **preprocessing_entries(self.preprocessing)})

    def model_hash(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()

    def save(self, path: str) -> str:
        data = self.to_bytes()
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_bytes(data)
        logger.info(f"Saved {self.method.value} detector to {path} ({len(data)} bytes)")
        return str(path)

    def _require_fitted(self) -> None:
        if self.preprocessing is None:
            raise InvalidArgumentError(f"{type(self).__name__} has not been fitted")

    @abstractmethod
    def _fit(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> None:
        pass

    @abstractmethod
    def _score(self, prepared: List[np.ndarray], kinds: List[ScoreKind]) -> Dict[str, np.ndarray]:
        pass

    @abstractmethod
    def _entries(self) -> Tuple[Dict[str, Any], Dict[str, bytes]]:
        pass

    @classmethod
    @abstractmethod
    def from_entries(cls, config: DetectorConfig, header: Dict[str, Any],
                     entries: Dict[str, bytes]) -> "AbstractDetector":
        pass
