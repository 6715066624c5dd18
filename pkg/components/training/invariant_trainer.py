import logging
import math
from typing import Union

import numpy as np
import torch
from tqdm import tqdm

from components.autodiff import adam_step, backward, make_adam, pca_eig, record
from constants.constants_enum import InvariantKind
from constants.constants_value import EIGENVALUE_FLOOR, TRAINING_ERROR_FLOOR
from entities.entity_config import ScaleConfig
from entities.entity_detector import TrainedScale
from entities.entity_exception import (
    DegenerateDataError, InsufficientDataError, InvalidArgumentError, TrainingDivergedError,
)
from entities.entity_features import FeatureMatrix
from models.vpn import AffineInvariantModel, VpnModel, training_loss
from utils.common import seed_everything

logger = logging.getLogger(__name__)


def select_k(eigenvalues: np.ndarray, p_percent: float) -> int:
    """Number of smallest-variance components that jointly explain less than p% of the variance.

    Floored at 1 and capped at D - 1.
    """
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    if eigenvalues.ndim != 1 or eigenvalues.size < 2:
        raise InvalidArgumentError(f"Need at least 2 eigenvalues, got shape {eigenvalues.shape}")
    if np.any(eigenvalues < 0):
        raise InvalidArgumentError("Eigenvalues must be non-negative")
    total = eigenvalues.sum()
    if total <= 0:
        raise DegenerateDataError("All eigenvalues are zero; the features are constant")

    explained = np.cumsum(np.sort(eigenvalues)) / total
    k = int(np.count_nonzero(explained < p_percent / 100.0))
    return min(max(k, 1), eigenvalues.size - 1)


def _as_array(features: Union[FeatureMatrix, np.ndarray]) -> np.ndarray:
    X = features.data if isinstance(features, FeatureMatrix) else np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidArgumentError(f"Training features must be 2-D, got shape {X.shape}")
    if X.shape[1] < 2:
        raise InvalidArgumentError(f"Invariant learning needs D >= 2, got {X.shape[1]}")
    if X.shape[0] < 2:
        raise InsufficientDataError(f"Invariant learning needs N >= 2, got {X.shape[0]}")
    return X


def _resolve_k(X: np.ndarray, cfg: ScaleConfig, eigenvalues: np.ndarray, allow_full: bool = False) -> int:
    dim = X.shape[1]
    if cfg.k is None:
        return select_k(eigenvalues, cfg.p_percent)
    limit = dim if allow_full else dim - 1
    if cfg.k > limit:
        raise InvalidArgumentError(f"K={cfg.k} exceeds the allowed maximum {limit} for D={dim}")
    return cfg.k


def training_errors(model: torch.nn.Module, X: np.ndarray, k: int) -> np.ndarray:
    """e_k: mean over the rows of g_k(f)^2, floored."""
    with torch.no_grad():
        z = model(torch.from_numpy(np.asarray(X, dtype=np.float64)))[:, :k]
        errors = (z ** 2).mean(dim=0).numpy()
    return np.maximum(errors, TRAINING_ERROR_FLOOR)


def train_scale(features: Union[FeatureMatrix, np.ndarray], cfg: ScaleConfig,
                progress: bool = False) -> TrainedScale:
    X = _as_array(features)
    n, dim = X.shape
    _, eigenvalues, _ = pca_eig(X)
    k = _resolve_k(X, cfg, eigenvalues)

    generator = seed_everything(cfg.seed)
    model = VpnModel(dim, cfg.n_blocks, cfg.hidden_width, generator)
    params = list(model.parameters())
    optimizer = make_adam(params, cfg.lr_start)
    data = torch.from_numpy(X)
    logger.info(f"Training VPN: N={n}, D={dim}, K={k}, blocks={cfg.n_blocks}, "
                f"backward loss {'on' if cfg.backward_loss else 'off'}")

    history = []
    for epoch in tqdm(range(cfg.epochs), desc="epochs", disable=not progress, leave=False):
        lr = cfg.learning_rate(epoch)
        order = torch.randperm(n, generator=generator)
        totals, forwards, backwards = [], [], []
        for batch_idx, start in enumerate(range(0, n, cfg.batch_size)):
            batch = data[order[start:start + cfg.batch_size]]
            with record():
                total, fwd, bwd = training_loss(model, batch, k, cfg.backward_loss)
            value = total.item()
            if not math.isfinite(value):
                raise TrainingDivergedError(epoch, batch_idx, value)
            adam_step(params, backward(total, params), optimizer, lr)
            totals.append(value)
            forwards.append(fwd.item())
            backwards.append(bwd.item())

        if not all(torch.isfinite(p).all() for p in params):
            raise TrainingDivergedError(epoch, batch_idx, float("nan"))
        history.append(float(np.mean(totals)))
        logger.info(f"epoch {epoch + 1}/{cfg.epochs} lr={lr:.2e} loss={history[-1]:.6g} "
                    f"(fwd {np.mean(forwards):.6g}, bwd {np.mean(backwards):.6g})")

    model.eval()
    errors = training_errors(model, X, k)
    return TrainedScale(model=model, kind=InvariantKind.VPN, k=k, errors=errors,
                        feature_store=X.copy(), history=history)


def fit_affine_scale(features: Union[FeatureMatrix, np.ndarray], cfg: ScaleConfig) -> TrainedScale:
    """Linear invariants from PCA; e_k are the K smallest covariance eigenvalues."""
    X = _as_array(features)
    mean, eigenvalues, eigenvectors = pca_eig(X)
    k = _resolve_k(X, cfg, eigenvalues, allow_full=True)
    model = AffineInvariantModel.from_pca(mean, eigenvectors)
    errors = np.maximum(eigenvalues[::-1][:k], EIGENVALUE_FLOOR)
    logger.info(f"Linear invariants: N={X.shape[0]}, D={X.shape[1]}, K={k}")
    return TrainedScale(model=model, kind=InvariantKind.AFFINE, k=k, errors=errors.copy(),
                        feature_store=X.copy(), history=[])
