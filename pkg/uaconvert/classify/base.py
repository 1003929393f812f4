from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Literal

import numpy as np

from ..toyworld.gmm import GmmWorld, class_posterior_x, class_posterior_y


class ClassifierModel(ABC):
    """Probabilistic binary classifier: score(x) in [0, 1]."""

    @abstractmethod
    def score_batch(self, x: np.ndarray) -> np.ndarray:
        """Scores for the rows of a 2-D array -> (n,)."""
        ...

    def score(self, x: np.ndarray):
        """Float for a single vector, (n,) array for a 2-D batch."""
        arr = np.asarray(x, dtype=np.float64)
        if arr.ndim <= 1:
            return float(self.score_batch(arr.reshape(1, -1))[0])
        return self.score_batch(arr)


class ExactGmmClassifier(ClassifierModel):
    """Bayes-optimal classifier of a GmmWorld in X space (f_X) or Y space (f_Y)."""

    def __init__(self, world: GmmWorld, space: Literal["x", "y"] = "x") -> None:
        if space not in ("x", "y"):
            raise ValueError(f"space must be 'x' or 'y', got {space!r}")
        self.world = world
        self.space = space

    def score_batch(self, x: np.ndarray) -> np.ndarray:
        fn = class_posterior_x if self.space == "x" else class_posterior_y
        return np.clip(fn(self.world, np.atleast_2d(x)), 0.0, 1.0)
