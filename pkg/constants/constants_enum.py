from enum import Enum


class StageStatus(Enum):
    Wait = 0
    Execute = 1
    Stop = 2
    Error = 3


class Method(Enum):
    NLINVS = "nlinvs"
    NLINVS_NO_BWD = "nlinvs-no-bwd"
    LINEAR_INVARIANTS = "linear-invariants"
    MAHAAD = "mahaad"
    DN2 = "dn2"

    @property
    def is_invariant(self) -> bool:
        return self in (Method.NLINVS, Method.NLINVS_NO_BWD, Method.LINEAR_INVARIANTS)


class ScoreKind(Enum):
    S_INV = "S_inv"
    S_2NN = "S_2nn"
    S_FINAL = "S_final"
    S_MAHA = "S_maha"
    S_DN2 = "S_dn2"


class ToyShape(Enum):
    CIRCLE = "circle"
    USHAPE = "ushape"


class InvariantKind(Enum):
    VPN = "vpn"
    AFFINE = "affine"


class ErrorType(Enum):
    # Data Validation Errors (2xx)
    INVALID_ARGUMENT = 200
    INVALID_DATA_FORMAT = 201
    INSUFFICIENT_DATA = 202
    DEGENERATE_DATA = 203
    MISSING_REQUIRED_DATA = 204

    # Runtime Errors (3xx)
    NUMERIC_ERROR = 300
    TRAINING_DIVERGED = 301
    INTERNAL_ERROR = 302

    # Configuration Errors (6xx)
    INVALID_CONFIG = 601

    @property
    def exit_code(self) -> int:
        if self in (ErrorType.INVALID_ARGUMENT, ErrorType.INVALID_CONFIG):
            return 2
        if self in (ErrorType.NUMERIC_ERROR, ErrorType.TRAINING_DIVERGED, ErrorType.INTERNAL_ERROR):
            return 4
        return 3
