from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np


def frozen_array(values, ndim: int, name: str) -> np.ndarray:
    """float64 read-only copy of `values` with the expected rank."""
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """Fixed-length real sequence with its sample rate."""

    values: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self) -> None:
        arr = frozen_array(self.values, 1, "Signal.values")
        if arr.size < 1:
            raise ValueError("Signal must hold at least one value")
        if not np.all(np.isfinite(arr)):
            raise ValueError("Signal values must be finite")
        if not float(self.sample_rate_hz) > 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @property
    def d(self) -> int:
        return int(self.values.shape[0])

    @property
    def duration_s(self) -> float:
        return self.d / self.sample_rate_hz

    def with_values(self, values, sample_rate_hz: float | None = None) -> "Signal":
        rate = self.sample_rate_hz if sample_rate_hz is None else sample_rate_hz
        return Signal(values, rate)

    def __len__(self) -> int:
        return self.d


@dataclass(frozen=True, eq=False)
class LabeledSignal:
    signal: Signal
    labels: np.ndarray

    def __post_init__(self) -> None:
        lab = np.array(self.labels, dtype=np.int8).reshape(-1)
        if not np.all((lab == 0) | (lab == 1)):
            raise ValueError("labels must be binary indicators")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)


@dataclass(frozen=True, eq=False)
class PosteriorEnsemble:
    """An observation and the K candidate solutions drawn for it (rows of `samples`)."""

    condition: Signal
    samples: np.ndarray
    sample_rate_hz: float = 1.0

    def __post_init__(self) -> None:
        arr = frozen_array(self.samples, 2, "PosteriorEnsemble.samples")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("ensemble needs K >= 1 samples of length d >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("ensemble samples must be finite")
        object.__setattr__(self, "samples", arr)

    @property
    def K(self) -> int:
        return int(self.samples.shape[0])

    @property
    def d(self) -> int:
        return int(self.samples.shape[1])

    def signals(self) -> Iterator[Signal]:
        for row in self.samples:
            yield Signal(row, self.sample_rate_hz)

    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=0)


@dataclass(frozen=True, eq=False)
class ScoreSet:
    """Classifier scores of every ensemble member, each in [0, 1]."""

    scores: np.ndarray

    def __post_init__(self) -> None:
        arr = frozen_array(self.scores, 1, "ScoreSet.scores")
        if arr.size < 1:
            raise ValueError("ScoreSet must not be empty")
        if not np.all((arr >= 0.0) & (arr <= 1.0)):
            raise ValueError("scores must lie in [0, 1]")
        object.__setattr__(self, "scores", arr)

    def __len__(self) -> int:
        return int(self.scores.shape[0])

    def mean(self) -> float:
        return float(self.scores.mean())
