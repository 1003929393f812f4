from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy import linalg
from scipy.special import logsumexp

from ..core.rng import RngStream
from ..core.schema import frozen_array
from ..errors import ConfigError, NumericalError

logger = logging.getLogger(__name__)

FULL_COVARIANCE_MAX_DIM = 16
_TOL = 1e-12


def _check_mixture(weights: np.ndarray, means: np.ndarray, covs: np.ndarray, what: str) -> None:
    if weights.ndim != 1 or weights.size < 1:
        raise ValueError(f"{what}: weights must be a non-empty vector")
    if np.any(weights <= 0) or abs(weights.sum() - 1.0) > _TOL:
        raise ValueError(f"{what}: weights must be positive and sum to 1 (sum={weights.sum()!r})")
    m = weights.size
    if means.shape[0] != m or covs.shape[0] != m:
        raise ValueError(f"{what}: {m} weights but {means.shape[0]} means, {covs.shape[0]} covs")
    d = means.shape[1]
    if covs.shape[1:] != (d, d):
        raise ValueError(f"{what}: covariances must be {d}x{d}, got {covs.shape[1:]}")


@dataclass(frozen=True, eq=False)
class GmmWorld:
    """
    Analytic joint world: X ~ sum_k w_k N(mu_k, Sigma_k), C = class of the drawn
    component, Y = X + channel_sigma * xi. Exact posteriors are closed form.
    """

    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    component_class: np.ndarray
    channel_sigma: float

    def __post_init__(self) -> None:
        w = frozen_array(self.weights, 1, "weights")
        mu = frozen_array(self.means, 2, "means")
        cov = frozen_array(self.covariances, 3, "covariances")
        _check_mixture(w, mu, cov, "GmmWorld")
        for k in range(w.size):
            if np.max(np.abs(cov[k] - cov[k].T)) > _TOL:
                raise ValueError(f"covariance {k} is not symmetric")
            if np.linalg.eigvalsh(cov[k]).min() <= 0:
                raise ValueError(f"covariance {k} is not positive definite")
        d = mu.shape[1]
        if d > FULL_COVARIANCE_MAX_DIM:
            off = cov - np.einsum("kii->ki", cov)[:, :, None] * np.eye(d)
            if np.any(off != 0):
                raise ValueError(f"d={d} > {FULL_COVARIANCE_MAX_DIM} requires diagonal covariances")
        cls = np.array(self.component_class, dtype=np.int8).reshape(-1)
        if cls.size != w.size or not np.all((cls == 0) | (cls == 1)):
            raise ValueError("component_class must hold one binary label per component")
        cls.setflags(write=False)
        sigma = float(self.channel_sigma)
        if not sigma >= 0:
            raise ValueError(f"channel_sigma must be non-negative, got {self.channel_sigma}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "covariances", cov)
        object.__setattr__(self, "component_class", cls)
        object.__setattr__(self, "channel_sigma", sigma)

    @property
    def n_components(self) -> int:
        return int(self.weights.size)

    @property
    def dim(self) -> int:
        return int(self.means.shape[1])

    def require_both_classes(self) -> None:
        if len(set(self.component_class.tolist())) < 2:
            raise ValueError("world needs at least one component of each class")

    def observation_covariances(self) -> np.ndarray:
        return self.covariances + self.channel_sigma**2 * np.eye(self.dim)


@dataclass(frozen=True, eq=False)
class PosteriorGmm:
    """pi(X | Y=y) for a GmmWorld: again a Gaussian mixture."""

    weights_given_y: np.ndarray
    means_given_y: np.ndarray
    covs_given_y: np.ndarray

    def __post_init__(self) -> None:
        w = frozen_array(self.weights_given_y, 1, "weights_given_y")
        mu = frozen_array(self.means_given_y, 2, "means_given_y")
        cov = frozen_array(self.covs_given_y, 3, "covs_given_y")
        _check_mixture(w, mu, cov, "PosteriorGmm")
        object.__setattr__(self, "weights_given_y", w)
        object.__setattr__(self, "means_given_y", mu)
        object.__setattr__(self, "covs_given_y", cov)

    @property
    def dim(self) -> int:
        return int(self.means_given_y.shape[1])


@dataclass(frozen=True, eq=False)
class JointSample:
    """n draws of (x, y, c) from a world; rows align."""

    x: np.ndarray
    y: np.ndarray
    c: np.ndarray
    component: np.ndarray

    def __len__(self) -> int:
        return int(self.x.shape[0])

    def head(self, n: int) -> "JointSample":
        return JointSample(self.x[:n], self.y[:n], self.c[:n], self.component[:n])


# ---------------------------
# Linear algebra helpers
# ---------------------------


def psd_factor(cov: np.ndarray) -> np.ndarray:
    """Lower factor L with L L^T = cov; eigen fallback for PSD matrices Cholesky rejects."""
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError:
        vals, vecs = linalg.eigh(cov)
        if vals.min() < -1e-9 * max(1.0, abs(vals.max())):
            raise NumericalError(
                f"covariance is not positive semi-definite (min eig {vals.min():.3g})"
            )
        return vecs * np.sqrt(np.clip(vals, 0.0, None))


def log_gaussian(x: np.ndarray, means: np.ndarray, covs: np.ndarray) -> np.ndarray:
    """log N(x_i; mu_k, S_k) for every row i and component k -> (n, M)."""
    x = np.atleast_2d(x)
    n, d = x.shape
    out = np.empty((n, means.shape[0]))
    for k in range(means.shape[0]):
        try:
            cf = linalg.cho_factor(covs[k], lower=True)
        except linalg.LinAlgError as e:
            raise NumericalError(f"singular covariance for component {k}") from e
        diff = x - means[k]
        maha = np.einsum("ij,ij->i", diff, linalg.cho_solve(cf, diff.T).T)
        logdet = 2.0 * np.sum(np.log(np.diag(cf[0])))
        out[:, k] = -0.5 * (maha + logdet + d * np.log(2.0 * np.pi))
    return out


def _responsibilities(log_w: np.ndarray, log_lik: np.ndarray) -> np.ndarray:
    joint = log_w[None, :] + log_lik
    return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))


def _class_mass(world: GmmWorld, log_lik: np.ndarray) -> np.ndarray:
    joint = np.log(world.weights)[None, :] + log_lik
    total = logsumexp(joint, axis=1)
    pos = world.component_class == 1
    if not pos.any():
        return np.zeros(joint.shape[0])
    if pos.all():
        return np.ones(joint.shape[0])
    return np.exp(logsumexp(joint[:, pos], axis=1) - total)


# ---------------------------
# Operations
# ---------------------------


def sample_joint(world: GmmWorld, stream: RngStream, n: int) -> JointSample:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gen = stream.generator
    comp = gen.choice(world.n_components, size=n, p=world.weights)
    z = gen.standard_normal((n, world.dim))
    x = np.empty((n, world.dim))
    for k in range(world.n_components):
        idx = comp == k
        if idx.any():
            x[idx] = world.means[k] + z[idx] @ psd_factor(world.covariances[k]).T
    y = x + world.channel_sigma * gen.standard_normal((n, world.dim))
    return JointSample(x=x, y=y, c=world.component_class[comp].astype(np.int8), component=comp)


def posterior_given_y(world: GmmWorld, y: np.ndarray) -> PosteriorGmm:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.size != world.dim or not np.all(np.isfinite(y)):
        raise ValueError(f"y must be a finite vector of length {world.dim}")
    s = world.observation_covariances()
    log_lik = log_gaussian(y, world.means, s)[0]
    weights = _responsibilities(np.log(world.weights), log_lik[None, :])[0]
    means = np.empty_like(world.means)
    covs = np.empty_like(world.covariances)
    for k in range(world.n_components):
        sig = world.covariances[k]
        try:
            gain = linalg.solve(s[k], sig, assume_a="pos").T
        except linalg.LinAlgError as e:
            raise NumericalError(f"singular observation covariance for component {k}") from e
        means[k] = world.means[k] + gain @ (y - world.means[k])
        c = sig - gain @ sig
        covs[k] = 0.5 * (c + c.T)
    # far-away components underflow to 0; keep them representable and renormalize
    weights = np.maximum(weights, np.finfo(np.float64).tiny)
    weights = weights / weights.sum()
    return PosteriorGmm(weights, means, covs)


def posterior_sample(posterior: PosteriorGmm, stream: RngStream, K: int) -> np.ndarray:
    """K exact i.i.d. draws from the posterior mixture -> (K, d)."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    gen = stream.generator
    comp = gen.choice(posterior.weights_given_y.size, size=K, p=posterior.weights_given_y)
    z = gen.standard_normal((K, posterior.dim))
    out = np.empty((K, posterior.dim))
    for k in np.unique(comp):
        idx = comp == k
        out[idx] = posterior.means_given_y[k] + z[idx] @ psd_factor(posterior.covs_given_y[k]).T
    return out


def class_posterior_x(world: GmmWorld, x: np.ndarray):
    """pi(C=1 | X=x) via prior responsibilities; scalar for a vector, array for rows."""
    arr = np.asarray(x, dtype=np.float64)
    log_lik = log_gaussian(arr.reshape(-1, world.dim), world.means, world.covariances)
    out = _class_mass(world, log_lik)
    return float(out[0]) if arr.ndim <= 1 else out


def class_posterior_y(world: GmmWorld, y: np.ndarray):
    """pi(C=1 | Y=y) = sum of posterior weights over class-1 components."""
    arr = np.asarray(y, dtype=np.float64)
    s = world.observation_covariances()
    out = _class_mass(world, log_gaussian(arr.reshape(-1, world.dim), world.means, s))
    return float(out[0]) if arr.ndim <= 1 else out


def mmse_estimate(posterior: PosteriorGmm) -> np.ndarray:
    return posterior.weights_given_y @ posterior.means_given_y


def mmse_estimates(world: GmmWorld, ys: np.ndarray) -> np.ndarray:
    """E[X | Y=y] for every row of `ys` -> (n, d), without building each posterior."""
    ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
    s = world.observation_covariances()
    resp = _responsibilities(np.log(world.weights), log_gaussian(ys, world.means, s))
    out = np.zeros_like(ys)
    for k in range(world.n_components):
        gain = linalg.solve(s[k], world.covariances[k], assume_a="pos").T
        out += resp[:, k : k + 1] * (world.means[k] + (ys - world.means[k]) @ gain.T)
    return out


def reverse_sample(world: GmmWorld, x: np.ndarray, stream: RngStream, K: int) -> np.ndarray:
    """K exact draws of Y | X=x (the forward channel) -> (K, d)."""
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    return x[None, :] + world.channel_sigma * stream.gaussian(K, world.dim)


# ---------------------------
# Construction & JSON documents
# ---------------------------


class WorldSpec(BaseModel):
    """JSON document describing a GmmWorld."""

    model_config = ConfigDict(extra="forbid")

    weights: List[float]
    means: List[List[float]]
    covariances: List[List[List[float]]]
    component_class: List[int]
    channel_sigma: float = Field(ge=0)

    def to_world(self) -> GmmWorld:
        try:
            return GmmWorld(
                weights=self.weights,
                means=self.means,
                covariances=self.covariances,
                component_class=self.component_class,
                channel_sigma=self.channel_sigma,
            )
        except ValueError as e:
            raise ConfigError(str(e), path="world") from e

    @classmethod
    def from_world(cls, world: GmmWorld) -> "WorldSpec":
        return cls(
            weights=world.weights.tolist(),
            means=world.means.tolist(),
            covariances=world.covariances.tolist(),
            component_class=world.component_class.tolist(),
            channel_sigma=world.channel_sigma,
        )


def load_world(path: str | Path) -> GmmWorld:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        spec = WorldSpec.model_validate(raw)
    except ValidationError as e:
        err = e.errors()[0]
        raise ConfigError(err["msg"], path=".".join(str(p) for p in err["loc"])) from e
    return spec.to_world()


def save_world(path: str | Path, world: GmmWorld) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = WorldSpec.from_world(world).model_dump_json(indent=2) + "\n"
    target.write_text(text, encoding="utf-8")
    return target


def make_world(
    dim: int = 2,
    n_components: int = 4,
    separation: float = 2.0,
    spread: float = 0.5,
    channel_sigma: float = 1.0,
    weights: Optional[List[float]] = None,
) -> GmmWorld:
    """
    Desk-scale world: components on +/- coordinate axes at distance `separation`,
    isotropic covariance spread^2 I, classes alternating by component index.
    In d=1 components are placed on a line at (k - (M-1)/2) * separation.
    """
    if dim < 1 or n_components < 1:
        raise ValueError("dim and n_components must be >= 1")
    means = np.zeros((n_components, dim))
    if dim == 1:
        means[:, 0] = (np.arange(n_components) - (n_components - 1) / 2.0) * separation
    else:
        for k in range(n_components):
            axis = (k // 2) % dim
            sign = 1.0 if k % 2 == 0 else -1.0
            ring = 1 + k // (2 * dim)
            means[k, axis] = sign * separation * ring
    covs = np.stack([spread**2 * np.eye(dim)] * n_components)
    if dim >= 2 and n_components >= 2:
        classes = [(k // 2) % 2 for k in range(n_components)]
        if len(set(classes)) < 2:
            classes = [k % 2 for k in range(n_components)]
    else:
        classes = [k % 2 for k in range(n_components)]
    w = np.full(n_components, 1.0 / n_components) if weights is None else np.asarray(weights)
    return GmmWorld(w, means, covs, classes, channel_sigma)
