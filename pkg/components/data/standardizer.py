import numpy as np

from constants.constants_value import STANDARDIZE_MIN_SCALE
from entities.entity_exception import InsufficientDataError, InvalidArgumentError
from entities.entity_features import StandardizationStats


def standardize_fit(X: np.ndarray) -> StandardizationStats:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise InsufficientDataError(f"Cannot fit standardisation on shape {X.shape}")
    return StandardizationStats(mean=X.mean(axis=0), scale=np.maximum(X.std(axis=0), STANDARDIZE_MIN_SCALE))


def _check(stats: StandardizationStats, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape[-1] != stats.mean.shape[0]:
        raise InvalidArgumentError(f"Expected {stats.mean.shape[0]} columns, got {X.shape[-1]}")
    return X


def standardize_apply(stats: StandardizationStats, X: np.ndarray) -> np.ndarray:
    return (_check(stats, X) - stats.mean) / stats.scale


def standardize_inverse(stats: StandardizationStats, X: np.ndarray) -> np.ndarray:
    return _check(stats, X) * stats.scale + stats.mean


def unit_normalize(X: np.ndarray) -> np.ndarray:
    """Rows scaled to unit L2 norm; zero rows stay zero."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=-1, keepdims=True)
    return np.divide(X, norms, out=np.zeros_like(X), where=norms > 0)
