from __future__ import annotations

from typing import Optional


class UaconvertError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(UaconvertError, ValueError):
    """Invalid configuration document; `path` is the dotted location inside it."""

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DatasetError(UaconvertError, ValueError):
    """Malformed signal file. Row/column are 0-based data positions when known."""

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[int] = None
    ) -> None:
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)


class SignalError(UaconvertError, ValueError):
    """Preprocessing precondition violated (band edges, zero variance, ...)."""


class NumericalError(UaconvertError, ArithmeticError):
    """Factorization failure or non-finite values; `step` is the sampler step if any."""

    def __init__(self, message: str, step: Optional[int] = None) -> None:
        self.step = step
        super().__init__(f"{message} (step {step})" if step is not None else message)


class TrainingError(UaconvertError, ArithmeticError):
    """Training diverged (NaN or exploding loss)."""

    def __init__(self, message: str, epoch: int) -> None:
        self.epoch = epoch
        super().__init__(f"{message} (epoch {epoch})")


class SamplingError(UaconvertError, ValueError):
    """Class-balanced batch sampling impossible for a label."""

    def __init__(self, message: str, label: int) -> None:
        self.label = label
        super().__init__(f"label {label}: {message}")


class CalibrationFailed(UaconvertError):
    """No threshold on the grid certifies the requested risk level."""
