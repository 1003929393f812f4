from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from ..core.rng import RngStream


@dataclass
class LossTrace:
    """Per-epoch (or per-iteration) training and validation loss."""

    train: List[float] = field(default_factory=list)
    val: List[float] = field(default_factory=list)

    def append(self, train_loss: float, val_loss: float) -> None:
        self.train.append(float(train_loss))
        self.val.append(float(val_loss))

    def rows(self) -> List[Tuple[int, float, float]]:
        return [(i + 1, t, v) for i, (t, v) in enumerate(zip(self.train, self.val))]

    def __len__(self) -> int:
        return len(self.train)


def split_validation(
    n: int, fraction: float, stream: RngStream
) -> Tuple[np.ndarray, np.ndarray]:
    """Random (train_idx, val_idx) split; at least one validation item when fraction > 0."""
    order = stream.generator.permutation(n)
    n_val = 0
    if fraction > 0 and n >= 2:
        n_val = min(n - 1, max(1, int(round(n * fraction))))
    return np.sort(order[n_val:]), np.sort(order[:n_val])


class Adam:
    """Adam with bias correction over a list of parameter arrays (updated in place)."""

    def __init__(
        self,
        params: Sequence[np.ndarray],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in self.params]
        self.v = [np.zeros_like(p) for p in self.params]
        self.t = 0

    def step(self, grads: Sequence[np.ndarray]) -> None:
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def diverged(loss: float, max_loss: float) -> bool:
    return not math.isfinite(loss) or loss > max_loss
