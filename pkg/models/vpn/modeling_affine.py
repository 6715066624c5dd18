from typing import Optional

import numpy as np
import torch
import torch.nn as nn

from entities.entity_exception import InvalidArgumentError


class AffineInvariantModel(nn.Module):
    """Linear invariants g(f) = W^T (f - mu), the columns of W ordered by ascending variance.

    Exposes the same forward/inverse surface as the VPN so the losses and scores
    apply unchanged; the map is orthogonal, hence volume preserving.
    """
    def __init__(self, mean: np.ndarray, rotation: np.ndarray):
        super().__init__()
        mean = torch.as_tensor(np.asarray(mean, dtype=np.float64))
        rotation = torch.as_tensor(np.asarray(rotation, dtype=np.float64))
        if rotation.ndim != 2 or rotation.shape != (mean.shape[0], mean.shape[0]):
            raise InvalidArgumentError(
                f"Rotation of shape {tuple(rotation.shape)} for a mean of length {mean.shape[0]}")
        self.dim = mean.shape[0]
        self.register_buffer("mean", mean.clone())
        self.register_buffer("rotation", rotation.clone())

    @classmethod
    def from_pca(cls, mean: np.ndarray, eigenvectors_desc: np.ndarray) -> "AffineInvariantModel":
        return cls(mean, np.ascontiguousarray(eigenvectors_desc[:, ::-1]))

    def forward(self, x: torch.Tensor, matrices: Optional[list] = None) -> torch.Tensor:
        x = torch.as_tensor(x, dtype=torch.float64)
        if x.shape[-1] != self.dim:
            raise InvalidArgumentError(f"Expected {self.dim} features, got {x.shape[-1]}")
        return (x - self.mean) @ self.rotation

    def inverse(self, z: torch.Tensor, matrices: Optional[list] = None) -> torch.Tensor:
        z = torch.as_tensor(z, dtype=torch.float64)
        if z.shape[-1] != self.dim:
            raise InvalidArgumentError(f"Expected {self.dim} features, got {z.shape[-1]}")
        return z @ self.rotation.T + self.mean
