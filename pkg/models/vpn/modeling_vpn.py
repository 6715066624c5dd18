"""
Volume-preserving network: (rotation, coupling) x N followed by a final rotation.
inputs are (bs, D) or (D,); every layer has |det J| = 1 and a closed-form inverse.
"""
import math
from typing import List, Optional

import torch
import torch.nn as nn

from components.autodiff.matrix_exp import expm, skew_from_vector, skew_size
from entities.entity_exception import InvalidArgumentError


def _check_dim(x: torch.Tensor, dim: int) -> None:
    if x.shape[-1] != dim:
        raise InvalidArgumentError(f"Expected {dim} features, got {x.shape[-1]}")


class RotationLayer(nn.Module):
    """r(x) = expm([v]_x) x + b."""
    def __init__(self, dim: int):
        super().__init__()
        self.dim = dim
        self.v = nn.Parameter(torch.zeros(skew_size(dim), dtype=torch.float64))
        self.bias = nn.Parameter(torch.zeros(dim, dtype=torch.float64))

    def matrix(self) -> torch.Tensor:
        return expm(skew_from_vector(self.v, self.dim))

    def forward(self, x: torch.Tensor, matrix: Optional[torch.Tensor] = None) -> torch.Tensor:
        _check_dim(x, self.dim)
        rotation = self.matrix() if matrix is None else matrix
        return x @ rotation.T + self.bias

    def inverse(self, y: torch.Tensor, matrix: Optional[torch.Tensor] = None) -> torch.Tensor:
        # expm(-S) = expm(S)^T for skew S
        _check_dim(y, self.dim)
        rotation = self.matrix() if matrix is None else matrix
        return (y - self.bias) @ rotation


class CouplingLayer(nn.Module):
    """Additive coupling y = join(x_a + t(x_b), x_b), no scale term."""
    def __init__(self, dim: int, hidden_width: Optional[int] = None, generator: Optional[torch.Generator] = None):
        super().__init__()
        if dim < 2:
            raise InvalidArgumentError(f"Coupling layers need D >= 2, got {dim}")
        self.dim = dim
        self.split_a = math.ceil(dim / 2)
        width_b = dim - self.split_a
        hidden = width_b if hidden_width is None else hidden_width
        self.mlp = nn.Sequential(
            nn.Linear(width_b, hidden, dtype=torch.float64),
            nn.ReLU(),
            nn.Linear(hidden, hidden, dtype=torch.float64),
            nn.ReLU(),
            nn.Linear(hidden, hidden, dtype=torch.float64),
            nn.ReLU(),
            nn.Linear(hidden, self.split_a, dtype=torch.float64),
        )
        self.reset_parameters(generator)

    def reset_parameters(self, generator: Optional[torch.Generator] = None) -> None:
        with torch.no_grad():
            for layer in self.mlp:
                if isinstance(layer, nn.Linear):
                    layer.weight.normal_(0.0, math.sqrt(2.0 / layer.in_features), generator=generator)
                    layer.bias.zero_()

    def split(self, x: torch.Tensor):
        return x[..., :self.split_a], x[..., self.split_a:]

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        _check_dim(x, self.dim)
        x_a, x_b = self.split(x)
        return torch.cat([x_a + self.mlp(x_b), x_b], dim=-1)

    def inverse(self, y: torch.Tensor) -> torch.Tensor:
        _check_dim(y, self.dim)
        y_a, y_b = self.split(y)
        return torch.cat([y_a - self.mlp(y_b), y_b], dim=-1)


class VpnModel(nn.Module):
    def __init__(self, dim: int, n_blocks: int = 4, hidden_width: Optional[int] = None,
                 generator: Optional[torch.Generator] = None):
        super().__init__()
        if dim < 2:
            raise InvalidArgumentError(f"The VPN needs D >= 2, got {dim}")
        self.dim = dim
        self.n_blocks = n_blocks
        self.hidden_width = hidden_width
        layers: List[nn.Module] = []
        for _ in range(n_blocks):
            layers.append(RotationLayer(dim))
            layers.append(CouplingLayer(dim, hidden_width, generator))
        layers.append(RotationLayer(dim))
        self.layers = nn.ModuleList(layers)

    @property
    def rotations(self) -> List[RotationLayer]:
        return [layer for layer in self.layers if isinstance(layer, RotationLayer)]

    def rotation_matrices(self) -> List[torch.Tensor]:
        return [layer.matrix() for layer in self.rotations]

    def forward(self, x: torch.Tensor, matrices: Optional[List[torch.Tensor]] = None) -> torch.Tensor:
        return self.trace(x, matrices)[-1]

    def trace(self, x: torch.Tensor, matrices: Optional[List[torch.Tensor]] = None) -> List[torch.Tensor]:
        """Input followed by the output of every layer, in order."""
        x = torch.as_tensor(x, dtype=torch.float64)
        _check_dim(x, self.dim)
        matrices = self.rotation_matrices() if matrices is None else matrices
        outputs = [x]
        rotation_idx = 0
        for layer in self.layers:
            if isinstance(layer, RotationLayer):
                x = layer(x, matrices[rotation_idx])
                rotation_idx += 1
            else:
                x = layer(x)
            outputs.append(x)
        return outputs

    def inverse(self, z: torch.Tensor, matrices: Optional[List[torch.Tensor]] = None) -> torch.Tensor:
        z = torch.as_tensor(z, dtype=torch.float64)
        _check_dim(z, self.dim)
        matrices = self.rotation_matrices() if matrices is None else matrices
        rotation_idx = len(matrices) - 1
        for layer in reversed(self.layers):
            if isinstance(layer, RotationLayer):
                z = layer.inverse(z, matrices[rotation_idx])
                rotation_idx -= 1
            else:
                z = layer.inverse(z)
        return z


def _check_k(k: int, dim: int) -> None:
    if not 1 <= k < dim:
        raise InvalidArgumentError(f"K must satisfy 1 <= K < D={dim}, got {k}")


def project_invariants(z: torch.Tensor, k: int) -> torch.Tensor:
    """P_K: zero the first K coordinates."""
    return torch.cat([torch.zeros_like(z[..., :k]), z[..., k:]], dim=-1)


def forward_loss(model: nn.Module, batch: torch.Tensor, k: int,
                 matrices: Optional[List[torch.Tensor]] = None) -> torch.Tensor:
    """Mean over the batch of ||g_{1:K}(f)||^2."""
    _check_k(k, model.dim)
    batch = torch.atleast_2d(torch.as_tensor(batch, dtype=torch.float64))
    z = model(batch, matrices)
    return (z[:, :k] ** 2).sum(dim=1).mean()


def backward_loss(model: nn.Module, batch: torch.Tensor, k: int,
                  matrices: Optional[List[torch.Tensor]] = None) -> torch.Tensor:
    """Mean over the batch of ||g^-1(P_K g(f)) - f||^2."""
    _check_k(k, model.dim)
    batch = torch.atleast_2d(torch.as_tensor(batch, dtype=torch.float64))
    z = model(batch, matrices)
    reconstruction = model.inverse(project_invariants(z, k), matrices)
    return ((reconstruction - batch) ** 2).sum(dim=1).mean()


def training_loss(model: nn.Module, batch: torch.Tensor, k: int, use_backward: bool = True):
    """Forward loss plus (optionally) backward loss, sharing one set of rotation matrices."""
    matrices = model.rotation_matrices() if isinstance(model, VpnModel) else None
    fwd = forward_loss(model, batch, k, matrices)
    if not use_backward:
        return fwd, fwd, torch.zeros_like(fwd)
    bwd = backward_loss(model, batch, k, matrices)
    return fwd + bwd, fwd, bwd
