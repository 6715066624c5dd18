from .modeling_affine import AffineInvariantModel
from .modeling_vpn import (
    CouplingLayer, RotationLayer, VpnModel, backward_loss, forward_loss,
    project_invariants, training_loss,
)
from .serialization import deserialize, model_hash, serialize

__all__ = [
    "AffineInvariantModel",
    "CouplingLayer",
    "RotationLayer",
    "VpnModel",
    "backward_loss",
    "forward_loss",
    "project_invariants",
    "training_loss",
    "deserialize",
    "model_hash",
    "serialize",
]
