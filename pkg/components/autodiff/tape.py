from contextlib import contextmanager
from typing import Callable, Iterator, List, Sequence

import torch

from entities.entity_exception import InvalidArgumentError


@contextmanager
def record() -> Iterator[None]:
    """Record operations for reverse mode; torch's autograd graph is the tape."""
    with torch.enable_grad():
        yield


def backward(loss: torch.Tensor, leaves: Sequence[torch.Tensor]) -> List[torch.Tensor]:
    """Gradients of a scalar loss for every leaf; unreachable leaves get zeros."""
    if loss.numel() != 1:
        raise InvalidArgumentError(f"backward needs a scalar loss, got shape {tuple(loss.shape)}")
    leaves = list(leaves)
    grads = torch.autograd.grad(loss.reshape(()), leaves, allow_unused=True)
    return [torch.zeros_like(leaf) if grad is None else grad for leaf, grad in zip(leaves, grads)]


def central_difference(fn: Callable[[], torch.Tensor], leaf: torch.Tensor, eps: float = 1e-5) -> torch.Tensor:
    """Finite-difference gradient of ``fn`` with respect to ``leaf`` (perturbed in place)."""
    grad = torch.zeros_like(leaf)
    flat = leaf.data.view(-1)
    with torch.no_grad():
        for i in range(flat.numel()):
            original = flat[i].item()
            flat[i] = original + eps
            upper = fn().item()
            flat[i] = original - eps
            lower = fn().item()
            flat[i] = original
            grad.view(-1)[i] = (upper - lower) / (2 * eps)
    return grad
