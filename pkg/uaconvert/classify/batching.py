from __future__ import annotations

import logging
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from ..core.rng import RngStream
from ..core.schema import LabeledSignal
from ..errors import SamplingError

logger = logging.getLogger(__name__)


def check_label_support(labels: np.ndarray) -> None:
    lab = np.asarray(labels)
    for j in range(lab.shape[1]):
        if not np.any(lab[:, j] == 1):
            raise SamplingError("no positive example", label=j)
        if not np.any(lab[:, j] == 0):
            raise SamplingError("no negative example", label=j)


def label_matrix(training_set: Union[np.ndarray, Sequence[LabeledSignal]]) -> np.ndarray:
    if isinstance(training_set, np.ndarray):
        lab = training_set
    else:
        lab = np.stack([item.labels for item in training_set])
    return lab[:, None] if lab.ndim == 1 else lab


def balanced_batches(
    training_set: Union[np.ndarray, Sequence[LabeledSignal]],
    batch_half_size: int,
    major_label: int = 0,
    major_ratio: float = 0.2,
    stream: Optional[RngStream] = None,
    n_batches: Optional[int] = None,
) -> Iterator[np.ndarray]:
    """
    Class-balanced batches of item indices (length 2b) into `training_set`
    (labeled signals, or directly their n x L label matrix).

    Each of the b draws picks a label L uniformly, one positive for L, and one
    negative for L. For L other than the major label the negative additionally
    has its major-label bit drawn from Bernoulli(major_ratio); if no item fits
    that pool the plain negatives for L are used. Batch j uses `stream.child(j)`.
    Infinite unless `n_batches` is given.
    """
    lab = label_matrix(training_set)
    if batch_half_size < 1:
        raise ValueError(f"batch_half_size must be >= 1, got {batch_half_size}")
    if not 0 <= major_label < lab.shape[1]:
        raise ValueError(f"major_label {major_label} outside [0, {lab.shape[1]})")
    if not 0.0 <= major_ratio <= 1.0:
        raise ValueError(f"major_ratio must lie in [0, 1], got {major_ratio}")
    check_label_support(lab)
    stream = stream or RngStream(0)
    return _iterate(lab, batch_half_size, major_label, major_ratio, stream, n_batches)


def _iterate(
    lab: np.ndarray,
    batch_half_size: int,
    major_label: int,
    major_ratio: float,
    stream: RngStream,
    n_batches: Optional[int],
) -> Iterator[np.ndarray]:
    n_labels = lab.shape[1]
    positives = [np.flatnonzero(lab[:, j] == 1) for j in range(n_labels)]
    negatives = [np.flatnonzero(lab[:, j] == 0) for j in range(n_labels)]
    # negatives for label j split by the major-label bit
    pools = [
        [negatives[j][lab[negatives[j], major_label] == bit] for bit in (0, 1)]
        for j in range(n_labels)
    ]

    j = 0
    while n_batches is None or j < n_batches:
        gen = stream.child(j).generator
        batch = np.empty(2 * batch_half_size, dtype=np.int64)
        for i in range(batch_half_size):
            label = int(gen.integers(n_labels))
            batch[2 * i] = gen.choice(positives[label])
            pool = negatives[label]
            if label != major_label:
                bit = int(gen.random() < major_ratio)
                if pools[label][bit].size:
                    pool = pools[label][bit]
                else:
                    logger.debug("label %d: empty major-bit=%d pool", label, bit)
            batch[2 * i + 1] = gen.choice(pool)
        yield batch
        j += 1
