from __future__ import annotations

import logging
from typing import Callable, Tuple

import numpy as np

from ..core.rng import RngStream
from ..core.schema import PosteriorEnsemble, Signal
from ..errors import NumericalError
from ..toyworld.gmm import GmmWorld, posterior_given_y
from ..toyworld.sampler import PosteriorSampler
from .denoisers import AnalyticGmmDenoiser, DenoiserModel
from .schedule import NoiseSchedule, check_alpha_bar

logger = logging.getLogger(__name__)


def diffuse(x0: np.ndarray, eps: np.ndarray, alpha_bar: float) -> np.ndarray:
    """x_t = sqrt(ab) x0 + sqrt(1 - ab) eps."""
    return np.sqrt(alpha_bar) * x0 + np.sqrt(1.0 - alpha_bar) * eps


def forward_noising(
    x0: np.ndarray, step_index: int, stream: RngStream, schedule: NoiseSchedule
) -> Tuple[np.ndarray, np.ndarray]:
    if not 0 <= step_index < schedule.n_train_steps:
        raise IndexError(f"step_index {step_index} outside [0, {schedule.n_train_steps})")
    x0 = np.asarray(x0, dtype=np.float64)
    eps = stream.gaussian(*x0.shape)
    return diffuse(x0, eps, schedule.alpha_bar(step_index)), eps


def predict_x0(x_t: np.ndarray, eps_hat: np.ndarray, alpha_bar: float) -> np.ndarray:
    return (x_t - np.sqrt(1.0 - alpha_bar) * eps_hat) / np.sqrt(alpha_bar)


def ddim_step(
    x_t: np.ndarray,
    epsilon_hat: np.ndarray,
    step_index: int,
    prev_step_index: int,
    schedule: NoiseSchedule,
) -> np.ndarray:
    """Deterministic (eta = 0) DDIM update; prev_step_index -1 lands on the clean end."""
    if prev_step_index >= step_index:
        raise ValueError(f"prev_step_index {prev_step_index} must precede {step_index}")
    ab_t = schedule.alpha_bar(step_index)
    ab_prev = schedule.alpha_bar(prev_step_index)
    check_alpha_bar(ab_t, step_index)
    x0_hat = predict_x0(x_t, epsilon_hat, ab_t)
    return np.sqrt(ab_prev) * x0_hat + np.sqrt(1.0 - ab_prev) * epsilon_hat


def ddim_sample(
    denoiser: DenoiserModel,
    y: np.ndarray,
    stream: RngStream,
    schedule: NoiseSchedule,
    K: int,
    dim: int | None = None,
    sample_rate_hz: float = 1.0,
) -> PosteriorEnsemble:
    """
    K independent DDIM chains for observation `y`. Chain i starts from
    x_T ~ N(0, I) drawn from `stream.child(i)`; chains are advanced together.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    d = y.size if dim is None else int(dim)
    x = np.stack([stream.child(i).gaussian(d) for i in range(K)])
    steps = schedule.timesteps()
    for j, t in enumerate(steps):
        prev = int(steps[j + 1]) if j + 1 < len(steps) else -1
        eps_hat = denoiser.predict(x, y, int(t))
        if not np.all(np.isfinite(eps_hat)):
            raise NumericalError("denoiser returned non-finite values", step=int(t))
        x = ddim_step(x, eps_hat, int(t), prev, schedule)
    if not np.all(np.isfinite(x)):
        raise NumericalError("DDIM chain diverged", step=0)
    return PosteriorEnsemble(Signal(y, sample_rate_hz), x, sample_rate_hz)


class DdimSampler(PosteriorSampler):
    """Posterior sampler running DDIM with a denoiser built per observation."""

    def __init__(
        self,
        denoiser_for: Callable[[np.ndarray], DenoiserModel],
        schedule: NoiseSchedule,
        dim: int | None = None,
    ) -> None:
        self.denoiser_for = denoiser_for
        self.schedule = schedule
        self.dim = dim

    @classmethod
    def analytic(cls, world: GmmWorld, schedule: NoiseSchedule) -> "DdimSampler":
        return cls(
            lambda y: AnalyticGmmDenoiser(posterior_given_y(world, y), schedule),
            schedule,
            world.dim,
        )

    @classmethod
    def trained(cls, model: DenoiserModel, schedule: NoiseSchedule, dim: int) -> "DdimSampler":
        return cls(lambda y: model, schedule, dim)

    def sample(self, y: np.ndarray, stream: RngStream, K: int) -> PosteriorEnsemble:
        return ddim_sample(
            self.denoiser_for(y), y, stream, self.schedule, K, self.dim, self.sample_rate_hz
        )
