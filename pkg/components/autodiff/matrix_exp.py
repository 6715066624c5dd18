"""Skew-symmetric parametrisation and a differentiable matrix exponential.

``expm`` runs scipy's scaling-and-squaring Pade-13 routine on the forward pass.
Its backward pass applies the adjoint of the Frechet derivative, read off the
upper-right block of ``expm([[S^T, G], [0, S^T]])``.
"""
import numpy as np
import scipy.linalg
import torch
from torch.autograd.function import once_differentiable

from entities.entity_exception import InvalidArgumentError, NumericError


def skew_size(n: int) -> int:
    return n * (n - 1) // 2


def skew_indices(n: int) -> torch.Tensor:
    """Pairs (i, j), i < j, row-major over the strict upper triangle; k-th row is pair k."""
    return torch.triu_indices(n, n, offset=1).T


def skew_from_vector(v: torch.Tensor, n: int) -> torch.Tensor:
    """Build S = [v]_x with S[j][i] = v_k and S[i][j] = -v_k for the k-th pair (i < j).

    For n = 2 this gives [[0, -theta], [theta, 0]], whose exponential rotates
    counter-clockwise by theta.
    """
    v = torch.as_tensor(v, dtype=torch.float64)
    if v.ndim != 1 or v.numel() != skew_size(n):
        raise InvalidArgumentError(
            f"Skew vector for n={n} needs {skew_size(n)} entries, got {tuple(v.shape)}")
    pairs = skew_indices(n)
    lower = v.new_zeros((n, n)).index_put((pairs[:, 1], pairs[:, 0]), v)
    return lower - lower.T


def _check_square(S: torch.Tensor, name: str = "S") -> None:
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {tuple(S.shape)}")


def _expm_numpy(a: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise NumericError("Matrix exponential of a non-finite matrix")
    result = scipy.linalg.expm(a)
    if not np.all(np.isfinite(result)):
        raise NumericError("Matrix exponential overflowed", norm=float(np.abs(a).max()))
    return result


def expm_vjp(S: torch.Tensor, G: torch.Tensor) -> torch.Tensor:
    """Gradient of <G, expm(S)> with respect to S."""
    _check_square(S)
    _check_square(G, "G")
    if S.shape != G.shape:
        raise InvalidArgumentError(f"S {tuple(S.shape)} and G {tuple(G.shape)} differ in shape")
    n = S.shape[0]
    s_t = S.detach().cpu().numpy().T
    block = np.zeros((2 * n, 2 * n), dtype=np.float64)
    block[:n, :n] = s_t
    block[:n, n:] = G.detach().cpu().numpy()
    block[n:, n:] = s_t
    return torch.from_numpy(_expm_numpy(block)[:n, n:].copy()).to(S)


class MatrixExp(torch.autograd.Function):
    @staticmethod
    def forward(ctx, S):
        ctx.save_for_backward(S)
        return torch.from_numpy(_expm_numpy(S.detach().cpu().numpy())).to(S)

    @staticmethod
    @once_differentiable
    def backward(ctx, grad_output):
        (S,) = ctx.saved_tensors
        return expm_vjp(S, grad_output)


def expm(S: torch.Tensor) -> torch.Tensor:
    S = torch.as_tensor(S, dtype=torch.float64)
    _check_square(S)
    if not torch.isfinite(S).all():
        raise NumericError("Matrix exponential of a non-finite matrix")
    return MatrixExp.apply(S)
