from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import linalg

from ..core.schema import PosteriorEnsemble, Signal
from ..errors import NumericalError


@dataclass(frozen=True, eq=False)
class GaussianSummary:
    """Moment summary of a sample set: mean (d,) and covariance (d, d)."""

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        mu = np.array(self.mean, dtype=np.float64).reshape(-1)
        cov = np.array(self.covariance, dtype=np.float64).reshape(mu.size, mu.size)
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-10):
            raise ValueError("covariance must be symmetric")
        cov = 0.5 * (cov + cov.T)
        mu.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mu)
        object.__setattr__(self, "covariance", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def fit_gaussian(samples: np.ndarray) -> GaussianSummary:
    """Sample mean and unbiased (n - 1) covariance of the rows."""
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] < 2:
        raise ValueError(f"need at least 2 samples to fit a Gaussian, got {x.shape[0]}")
    return GaussianSummary(x.mean(axis=0), np.atleast_2d(np.cov(x, rowvar=False, ddof=1)))


def _as_vector(v) -> np.ndarray:
    return np.asarray(v.values if isinstance(v, Signal) else v, dtype=np.float64).reshape(-1)


def rmse(a, b) -> float:
    x, y = _as_vector(a), _as_vector(b)
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    return float(np.sqrt(np.mean((x - y) ** 2)))


def _psd_sqrt(mat: np.ndarray, what: str) -> np.ndarray:
    vals, vecs = linalg.eigh(0.5 * (mat + mat.T))
    tol = 1e-8 * max(1.0, float(np.abs(vals).max(initial=0.0)))
    if vals.size and vals.min() < -tol:
        raise NumericalError(f"{what} is not positive semi-definite (min eig {vals.min():.3g})")
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T


def frechet_distance(p: GaussianSummary, q: GaussianSummary) -> float:
    """
    ||mu_p - mu_q||^2 + tr(S_p + S_q - 2 (S_p^1/2 S_q S_p^1/2)^1/2), the squared
    2-Wasserstein distance between the two Gaussians. Square roots go through
    symmetric eigendecompositions so the result is symmetric in (p, q).
    """
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    root_p = _psd_sqrt(p.covariance, "first covariance")
    inner = root_p @ q.covariance @ root_p
    vals = linalg.eigvalsh(0.5 * (inner + inner.T))
    tol = 1e-8 * max(1.0, float(np.abs(vals).max(initial=0.0)))
    if vals.min() < -tol:
        raise NumericalError(f"covariance product is not PSD (min eig {vals.min():.3g})")
    cross = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))
    diff = p.mean - q.mean
    fd = float(diff @ diff + np.trace(p.covariance) + np.trace(q.covariance) - 2.0 * cross)
    return max(fd, 0.0)


def sample_frechet(a: np.ndarray, b: np.ndarray) -> float:
    """FD between the Gaussian fits of two sample sets."""
    return frechet_distance(fit_gaussian(a), fit_gaussian(b))


@dataclass(frozen=True)
class ConversionQuality:
    rmse: float
    fd_single: float
    fd_ensemble: float
    n_items: int
    K: int

    def to_dict(self) -> dict:
        return {
            "rmse": self.rmse,
            "fd_1": self.fd_single,
            "fd_K": self.fd_ensemble,
            "n_items": self.n_items,
            "K": self.K,
        }


def conversion_quality(
    ensembles: Sequence[PosteriorEnsemble], truths: np.ndarray
) -> ConversionQuality:
    """
    RMSE: mean over items of the mean per-sample RMSE to the ground truth.
    1-FD: first sample of each item vs the ground truths. K-FD: every sample vs
    the ground truths, each repeated K times.
    """
    truths = np.atleast_2d(np.asarray(truths, dtype=np.float64))
    if len(ensembles) != truths.shape[0]:
        raise ValueError(f"{len(ensembles)} ensembles for {truths.shape[0]} ground truths")
    K = min(e.K for e in ensembles)
    per_item = [
        np.mean(np.sqrt(np.mean((e.samples - g[None, :]) ** 2, axis=1)))
        for e, g in zip(ensembles, truths)
    ]
    first = np.stack([e.samples[0] for e in ensembles])
    all_samples = np.concatenate([e.samples[:K] for e in ensembles])
    return ConversionQuality(
        rmse=float(np.mean(per_item)),
        fd_single=sample_frechet(first, truths),
        fd_ensemble=sample_frechet(all_samples, np.repeat(truths, K, axis=0)),
        n_items=truths.shape[0],
        K=K,
    )
