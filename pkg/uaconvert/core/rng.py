from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

_MAX_SEED = 2**64 - 1


class RngStream:
    """
    Deterministic random stream identified by (master_seed, stream_index).

    Draws come from numpy's counter-based Philox generator keyed through a
    SeedSequence spawn key, so any stream can be derived without touching any
    other one. Nested streams (`child`) extend the spawn key. A stream is
    single-owner: sharing one instance between threads interleaves draws.
    """

    __slots__ = ("master_seed", "stream_index", "_path", "_gen")

    def __init__(self, master_seed: int, stream_index: int = 0, _path: Tuple[int, ...] = ()):
        if not 0 <= int(master_seed) <= _MAX_SEED:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
        if int(stream_index) < 0:
            raise ValueError(f"stream_index must be non-negative, got {stream_index}")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        self._path = tuple(int(p) for p in _path)
        self._gen: Optional[np.random.Generator] = None

    @property
    def spawn_key(self) -> Tuple[int, ...]:
        return (self.stream_index, *self._path)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            seq = np.random.SeedSequence(self.master_seed, spawn_key=self.spawn_key)
            self._gen = np.random.Generator(np.random.Philox(seq))
        return self._gen

    def child(self, *indices: int) -> "RngStream":
        """Independent sub-stream, e.g. `stream.child(item, chain)`."""
        if any(int(i) < 0 for i in indices):
            raise ValueError("child indices must be non-negative")
        return RngStream(self.master_seed, self.stream_index, self._path + tuple(indices))

    def gaussian(self, *shape: int) -> np.ndarray:
        return self.generator.standard_normal(shape)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.master_seed}, key={self.spawn_key})"


def gaussian_draw(stream: RngStream, n: int) -> np.ndarray:
    """n i.i.d. standard-normal variates from `stream`."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return stream.gaussian(int(n))
