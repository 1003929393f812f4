from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from ..core.rng import RngStream
from ..core.schema import PosteriorEnsemble, Signal
from .gmm import GmmWorld, posterior_given_y, posterior_sample, reverse_sample


class PosteriorSampler(ABC):
    """g(Y, Z): draws K candidate solutions for one observation."""

    sample_rate_hz: float = 1.0

    @abstractmethod
    def sample(self, y: np.ndarray, stream: RngStream, K: int) -> PosteriorEnsemble:
        ...


class ExactPosteriorSampler(PosteriorSampler):
    """Exact pi(X | Y=y) draws for a GmmWorld."""

    def __init__(self, world: GmmWorld) -> None:
        self.world = world

    def sample(self, y: np.ndarray, stream: RngStream, K: int) -> PosteriorEnsemble:
        samples = posterior_sample(posterior_given_y(self.world, y), stream, K)
        return PosteriorEnsemble(Signal(y, self.sample_rate_hz), samples, self.sample_rate_hz)


class ExactChannelSampler(PosteriorSampler):
    """Reverse direction: exact Y | X=x draws (the world's channel)."""

    def __init__(self, world: GmmWorld) -> None:
        self.world = world

    def sample(self, x: np.ndarray, stream: RngStream, K: int) -> PosteriorEnsemble:
        samples = reverse_sample(self.world, x, stream, K)
        return PosteriorEnsemble(Signal(x, self.sample_rate_hz), samples, self.sample_rate_hz)
