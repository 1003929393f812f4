from __future__ import annotations

import numpy as np

MIN_SAMPLES = 100


def discretize(values: np.ndarray, bins: int = 32) -> np.ndarray:
    """
    Equal-width bin codes. Each column is binned over its own [min, max]; the
    per-column bins of a multivariate sample are combined into one cell code.
    """
    v = np.asarray(values, dtype=np.float64)
    v = v[:, None] if v.ndim == 1 else v
    codes = np.empty(v.shape, dtype=np.int64)
    for j in range(v.shape[1]):
        lo, hi = v[:, j].min(), v[:, j].max()
        if hi <= lo:
            codes[:, j] = 0
            continue
        edges = np.linspace(lo, hi, bins + 1)
        codes[:, j] = np.clip(np.searchsorted(edges, v[:, j], side="right") - 1, 0, bins - 1)
    return np.ravel_multi_index(codes.T, (bins,) * v.shape[1])


def mutual_information(u: np.ndarray, v: np.ndarray, bins: int = 32) -> float:
    """Plug-in mutual information (nats) of the binned pair, no bias correction."""
    a = discretize(u, bins)
    b = discretize(v, bins)
    n = a.size
    if n != b.size:
        raise ValueError(f"{a.size} vs {b.size} samples")
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    joint = np.zeros((ia.max() + 1, ib.max() + 1))
    np.add.at(joint, (ia, ib), 1.0)
    joint /= n
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float(np.sum(joint[nz] * np.log(joint[nz] / (pa @ pb)[nz])))
