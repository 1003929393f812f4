from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..core.schema import frozen_array
from ..errors import NumericalError


class ScheduleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_train_steps: int = Field(1000, ge=2)
    beta_start: float = Field(1e-6, gt=0, lt=1)
    beta_end: float = Field(1e-2, gt=0, lt=1)
    ddim_stride: int = Field(10, ge=1)

    def build(self) -> "NoiseSchedule":
        return NoiseSchedule(self.n_train_steps, self.beta_start, self.beta_end, self.ddim_stride)


@dataclass(frozen=True, eq=False)
class NoiseSchedule:
    """Linear beta schedule, cumulative alpha-bar table and the DDIM sub-sequence."""

    n_train_steps: int = 1000
    beta_start: float = 1e-6
    beta_end: float = 1e-2
    ddim_stride: int = 10
    betas: np.ndarray = field(init=False, repr=False)
    alphas_bar: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n_train_steps < 2 or self.ddim_stride < 1:
            raise ValueError("need n_train_steps >= 2 and ddim_stride >= 1")
        if self.n_train_steps % self.ddim_stride:
            raise ValueError(
                f"n_train_steps={self.n_train_steps} not divisible by "
                f"ddim_stride={self.ddim_stride}"
            )
        if not 0 < self.beta_start < self.beta_end < 1:
            raise ValueError("betas must satisfy 0 < beta_start < beta_end < 1")
        betas = np.linspace(self.beta_start, self.beta_end, self.n_train_steps)
        alphas_bar = np.cumprod(1.0 - betas)
        if not np.all(np.diff(alphas_bar) < 0) or alphas_bar[-1] <= 0:
            raise ValueError("alphas_bar must be strictly decreasing in (0, 1]")
        object.__setattr__(self, "betas", frozen_array(betas, 1, "betas"))
        object.__setattr__(self, "alphas_bar", frozen_array(alphas_bar, 1, "alphas_bar"))

    @property
    def n_sampling_steps(self) -> int:
        return self.n_train_steps // self.ddim_stride

    def timesteps(self) -> np.ndarray:
        """DDIM step indices from noisiest to cleanest, e.g. 999, 989, ..., 9."""
        return np.arange(self.n_train_steps - 1, -1, -self.ddim_stride)

    def alpha_bar(self, step_index: int) -> float:
        """alpha-bar at a training step; index -1 denotes the clean end (1.0)."""
        if step_index < 0:
            return 1.0
        if step_index >= self.n_train_steps:
            raise IndexError(f"step_index {step_index} outside schedule of {self.n_train_steps}")
        return float(self.alphas_bar[step_index])

    def with_stride(self, ddim_stride: int) -> "NoiseSchedule":
        return NoiseSchedule(self.n_train_steps, self.beta_start, self.beta_end, ddim_stride)

    def to_config(self) -> ScheduleConfig:
        return ScheduleConfig(
            n_train_steps=self.n_train_steps,
            beta_start=self.beta_start,
            beta_end=self.beta_end,
            ddim_stride=self.ddim_stride,
        )


def check_alpha_bar(alpha_bar: float, step_index: int) -> None:
    if not alpha_bar > 0:
        raise NumericalError(f"alpha_bar must be positive, got {alpha_bar}", step=step_index)
