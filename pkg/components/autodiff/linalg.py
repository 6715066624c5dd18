from typing import Tuple

import numpy as np

from constants.constants_value import EIGENVALUE_CLAMP
from entities.entity_exception import InsufficientDataError, NumericError


def pca_eig(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Mean, descending eigenvalues and orthonormal eigenvectors (columns) of the sample covariance."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise InsufficientDataError(f"PCA needs at least 2 rows, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NumericError("PCA input contains non-finite values")

    mean = X.mean(axis=0)
    covariance = np.atleast_2d(np.cov(X, rowvar=False, ddof=1))
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    eigenvalues = np.where(eigenvalues >= EIGENVALUE_CLAMP, np.maximum(eigenvalues, 0.0), eigenvalues)
    if np.any(eigenvalues < 0):
        raise NumericError("Covariance has clearly negative eigenvalues", smallest=float(eigenvalues.min()))
    return mean, eigenvalues, eigenvectors
