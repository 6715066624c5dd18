"""Training loss and test AUC on a 2-D slice of the VPN parameter space.

The slice is spanned by two seeded random directions; each direction block is
rescaled to the norm of the parameter tensor it perturbs.
"""
import copy
import json
import logging
from typing import List, Optional

import numpy as np
import pandas as pd
import torch
from joblib import Parallel, delayed

from components.evaluation.metrics import auroc
from components.scoring.invariant_detector import NlInvDetector, invariant_score_scale
from components.scoring.preprocessing import apply_preprocessing
from components.training import training_errors
from constants.constants_enum import InvariantKind
from entities.entity_detector import TrainedScale
from entities.entity_evaluation import LandscapeGrid
from entities.entity_exception import InvalidArgumentError
from entities.entity_features import FeatureMatrix
from models.vpn import training_loss
from utils.common import resolve_threads

logger = logging.getLogger(__name__)


def random_directions(model: torch.nn.Module, seed: int) -> List[List[torch.Tensor]]:
    generator = torch.Generator().manual_seed(seed)
    directions = []
    for _ in range(2):
        blocks = []
        for param in model.parameters():
            block = torch.randn(param.shape, generator=generator, dtype=torch.float64)
            param_norm, block_norm = param.detach().norm(), block.norm()
            if param_norm > 0 and block_norm > 0:
                block = block * (param_norm / block_norm)
            else:
                block = torch.zeros_like(block)
            blocks.append(block)
        directions.append(blocks)
    return directions


def grid_coordinates(grid_n: int, range_r: float) -> np.ndarray:
    coords = np.linspace(-range_r, range_r, grid_n)
    coords[np.abs(coords) < 1e-12 * max(range_r, 1.0)] = 0.0
    return coords


def _evaluate(ts: TrainedScale, base: List[torch.Tensor], directions, x: float, y: float,
              train: np.ndarray, test: np.ndarray, labels: np.ndarray, use_backward: bool):
    model = copy.deepcopy(ts.model)
    with torch.no_grad():
        for param, origin, d1, d2 in zip(model.parameters(), base, *directions):
            param.copy_(origin + x * d1 + y * d2)
        total, _, _ = training_loss(model, torch.from_numpy(train), ts.k, use_backward)
    loss = total.item()
    if not np.isfinite(loss):
        return loss, float("nan")
    moved = TrainedScale(model=model, kind=ts.kind, k=ts.k, errors=training_errors(model, train, ts.k),
                         feature_store=train)
    scores = invariant_score_scale(moved, test)
    auc = auroc(scores, labels) if np.all(np.isfinite(scores)) else float("nan")
    return loss, auc


def landscape(detector: NlInvDetector, train: Optional[np.ndarray], test: FeatureMatrix,
              grid_n: int = 25, range_r: float = 1.0, seed: int = 0) -> LandscapeGrid:
    if grid_n < 3:
        raise InvalidArgumentError(f"Grid needs at least 3 points per axis, got {grid_n}")
    if range_r <= 0:
        raise InvalidArgumentError(f"Range must be positive, got {range_r}")
    if not test.has_labels:
        raise InvalidArgumentError("Landscape test features need labels")
    if detector.n_scales != 1 or detector.detector.scales[0].kind is not InvariantKind.VPN:
        raise InvalidArgumentError("Landscape needs a trained single-scale VPN detector")

    ts = detector.detector.scales[0]
    # stored training features are already preprocessed
    train_x = ts.feature_store if train is None else apply_preprocessing(detector.preprocessing, [train])[0]
    test_x = apply_preprocessing(detector.preprocessing, [test.data])[0]
    use_backward = detector.config.scale.backward_loss
    base = [param.detach().clone() for param in ts.model.parameters()]
    directions = random_directions(ts.model, seed)
    xs = grid_coordinates(grid_n, range_r)
    ys = grid_coordinates(grid_n, range_r)
    logger.info(f"Landscape {grid_n}x{grid_n} over [-{range_r}, {range_r}]^2, seed {seed}")

    def run_row(x: float):
        return [_evaluate(ts, base, directions, x, y, train_x, test_x, test.labels, use_backward) for y in ys]

    rows = Parallel(n_jobs=min(resolve_threads(), grid_n), prefer="threads")(delayed(run_row)(x) for x in xs)
    loss = np.array([[cell[0] for cell in row] for row in rows])
    auc = np.array([[cell[1] for cell in row] for row in rows])
    center_loss, center_auc = _evaluate(ts, base, directions, 0.0, 0.0, train_x, test_x, test.labels, use_backward)
    return LandscapeGrid(xs=xs, ys=ys, loss=loss, auc=auc, center_loss=center_loss, center_auc=center_auc)


def save_landscape(grid: LandscapeGrid, path: str, config: Optional[dict] = None) -> str:
    frame = pd.DataFrame(list(grid.rows()), columns=["x", "y", "loss", "auc"])
    with open(path, "w") as f:
        f.write(f"# {json.dumps(config or {}, sort_keys=True)}\n")
        frame.to_csv(f, index=False, float_format="%.17g")
    logger.info(f"Landscape grid written to {path}")
    return str(path)
