from typing import Iterable, Sequence

import torch

from constants.constants_value import ADAM_BETAS, ADAM_EPS
from entities.entity_exception import InvalidArgumentError


def make_adam(params: Iterable[torch.nn.Parameter], lr: float) -> torch.optim.Adam:
    return torch.optim.Adam(params, lr=lr, betas=ADAM_BETAS, eps=ADAM_EPS)


def adam_step(params: Sequence[torch.Tensor], grads: Sequence[torch.Tensor],
              state: torch.optim.Adam, lr: float) -> None:
    """One Adam update of ``params`` in place; ``state`` keeps m, v and the step count."""
    if lr <= 0:
        raise InvalidArgumentError(f"Learning rate must be positive, got {lr}")
    if len(params) != len(grads):
        raise InvalidArgumentError(f"{len(params)} parameters but {len(grads)} gradients")
    for param, grad in zip(params, grads):
        if param.shape != grad.shape:
            raise InvalidArgumentError(
                f"Gradient shape {tuple(grad.shape)} does not match parameter {tuple(param.shape)}")
        param.grad = grad.detach().clone()
    for group in state.param_groups:
        group["lr"] = lr
    state.step()
