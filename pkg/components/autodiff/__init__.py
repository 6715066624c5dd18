from .linalg import pca_eig
from .matrix_exp import expm, expm_vjp, skew_from_vector
from .optimizer import adam_step, make_adam
from .tape import backward, record

__all__ = [
    "pca_eig",
    "expm",
    "expm_vjp",
    "skew_from_vector",
    "adam_step",
    "make_adam",
    "backward",
    "record",
]
