from typing import Any, Dict

from constants.constants_enum import ErrorType


class NlinvError(Exception):
    error_type = ErrorType.INTERNAL_ERROR

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def exit_code(self) -> int:
        return self.error_type.exit_code

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.error_type.name,
            "code": self.error_type.value,
            "message": self.message,
            "context": {key: str(value) for key, value in self.context.items()},
        }


class InvalidArgumentError(NlinvError, ValueError):
    error_type = ErrorType.INVALID_ARGUMENT


class InvalidConfigError(NlinvError, ValueError):
    error_type = ErrorType.INVALID_CONFIG


class DataFormatError(NlinvError):
    error_type = ErrorType.INVALID_DATA_FORMAT


class InsufficientDataError(NlinvError):
    error_type = ErrorType.INSUFFICIENT_DATA


class DegenerateDataError(NlinvError):
    error_type = ErrorType.DEGENERATE_DATA


class MissingDataError(NlinvError, FileNotFoundError):
    error_type = ErrorType.MISSING_REQUIRED_DATA


class NumericError(NlinvError, ArithmeticError):
    error_type = ErrorType.NUMERIC_ERROR


class TrainingDivergedError(NumericError):
    error_type = ErrorType.TRAINING_DIVERGED

    def __init__(self, epoch: int, batch: int, loss: float):
        super().__init__(
            f"Training diverged at epoch {epoch}, batch {batch} (loss={loss})",
            epoch=epoch, batch=batch, loss=loss,
        )
        self.epoch = epoch
        self.batch = batch
