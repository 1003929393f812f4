from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy.special import expit

from ..core.rng import RngStream
from ..errors import ConfigError, DatasetError, TrainingError
from ..utils.training import LossTrace, diverged, split_validation
from .base import ClassifierModel
from .batching import balanced_batches

logger = logging.getLogger(__name__)

FeatureMap = Literal["linear", "quadratic"]


def feature_map(x: np.ndarray, features: FeatureMap = "linear") -> np.ndarray:
    """Rows of x, optionally extended with their squares (a quadratic decision surface)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if features == "linear":
        return x
    if features == "quadratic":
        return np.concatenate([x, x * x], axis=1)
    raise ValueError(f"unknown feature map {features!r}")


class LogisticClassifier(ClassifierModel):
    """score(x) = sigmoid(w . phi(x) + b)."""

    def __init__(self, weights: np.ndarray, bias: float, features: FeatureMap = "linear") -> None:
        w = np.array(weights, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(w)) or not np.isfinite(bias):
            raise ValueError("logistic parameters must be finite")
        w.setflags(write=False)
        self.weights = w
        self.bias = float(bias)
        self.features = features

    @property
    def dim(self) -> int:
        return self.weights.size // 2 if self.features == "quadratic" else self.weights.size

    @classmethod
    def zeros(cls, dim: int, features: FeatureMap = "linear") -> "LogisticClassifier":
        width = 2 * dim if features == "quadratic" else dim
        return cls(np.zeros(width), 0.0, features)

    def logits(self, x: np.ndarray) -> np.ndarray:
        phi = feature_map(x, self.features)
        if phi.shape[1] != self.weights.size:
            raise ValueError(f"expected {self.dim} input coordinates, got {np.shape(x)[-1]}")
        return phi @ self.weights + self.bias

    def score_batch(self, x: np.ndarray) -> np.ndarray:
        return expit(self.logits(x))


def bce_loss_and_grad(
    weights: np.ndarray, bias: float, phi: np.ndarray, c: np.ndarray
) -> Tuple[float, np.ndarray, float]:
    """Mean binary cross-entropy over (phi, c) and its gradient in (w, b)."""
    z = phi @ weights + bias
    loss = float(np.mean(np.logaddexp(0.0, z) - c * z))
    dz = (expit(z) - c) / z.size
    return loss, phi.T @ dz, float(dz.sum())


class LogisticTrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    features: FeatureMap = "linear"
    iterations: int = Field(500, ge=0)
    learning_rate: float = Field(0.5, gt=0)
    l2: float = Field(0.0, ge=0)
    validation_fraction: float = Field(0.1, ge=0, lt=1)
    # "balanced" draws class-balanced minibatches of 2 * batch_half_size items
    batching: Literal["full", "balanced"] = "full"
    batch_half_size: int = Field(32, ge=1)
    max_loss: float = Field(1e6, gt=0)


def train_logistic(
    x: np.ndarray,
    c: np.ndarray,
    hyperparams: LogisticTrainConfig,
    stream: RngStream,
) -> Tuple[LogisticClassifier, LossTrace]:
    """
    Gradient descent on the mean BCE from zero initialization. The trace has one
    row per iteration. Streams: child(0) validation split, child(1) minibatches.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    if c.size != x.shape[0]:
        raise DatasetError(f"{c.size} labels for {x.shape[0]} signals")
    if not (np.any(c == 1) and np.any(c == 0)):
        raise DatasetError("training labels must contain both classes")

    model = LogisticClassifier.zeros(x.shape[1], hyperparams.features)
    trace = LossTrace()
    if hyperparams.iterations == 0:
        return model, trace

    tr_idx, va_idx = split_validation(x.shape[0], hyperparams.validation_fraction, stream.child(0))
    phi = feature_map(x, hyperparams.features)
    phi_tr, c_tr = phi[tr_idx], c[tr_idx]
    batches = None
    if hyperparams.batching == "balanced":
        batches = balanced_batches(
            c_tr.astype(np.int8), hyperparams.batch_half_size, stream=stream.child(1)
        )

    w = model.weights.copy()
    b = model.bias
    for it in range(1, hyperparams.iterations + 1):
        if batches is not None:
            sel = next(batches)
            loss, gw, gb = bce_loss_and_grad(w, b, phi_tr[sel], c_tr[sel])
        else:
            loss, gw, gb = bce_loss_and_grad(w, b, phi_tr, c_tr)
        if hyperparams.l2:
            loss += 0.5 * hyperparams.l2 * float(w @ w)
            gw = gw + hyperparams.l2 * w
        if diverged(loss, hyperparams.max_loss):
            raise TrainingError(f"logistic loss diverged ({loss})", epoch=it)
        w = w - hyperparams.learning_rate * gw
        b = b - hyperparams.learning_rate * gb
        val = float("nan")
        if va_idx.size:
            val, _, _ = bce_loss_and_grad(w, b, phi[va_idx], c[va_idx])
        trace.append(loss, val)
        if it % 100 == 0:
            logger.debug("logistic iteration %d: train=%.5f val=%.5f", it, loss, val)
    return LogisticClassifier(w, b, hyperparams.features), trace


# ---------------------------
# Checkpoints (one classifier per label)
# ---------------------------


class LogisticParams(BaseModel):
    name: str
    weights: List[float]
    bias: float


class LogisticCheckpoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["logistic"] = "logistic"
    dim: int = Field(ge=1)
    features: FeatureMap = "linear"
    labels: List[LogisticParams] = Field(min_length=1)

    def to_models(self) -> List[LogisticClassifier]:
        width = 2 * self.dim if self.features == "quadratic" else self.dim
        out = []
        for i, p in enumerate(self.labels):
            if len(p.weights) != width:
                raise ConfigError(
                    f"{len(p.weights)} weights, expected {width}", path=f"labels.{i}.weights"
                )
            out.append(LogisticClassifier(np.array(p.weights), p.bias, self.features))
        return out


def save_classifiers(
    path: str | Path, models: Sequence[LogisticClassifier], names: Sequence[str]
) -> Path:
    ckpt = LogisticCheckpoint(
        dim=models[0].dim,
        features=models[0].features,
        labels=[
            LogisticParams(name=n, weights=m.weights.tolist(), bias=m.bias)
            for m, n in zip(models, names)
        ],
    )
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(ckpt.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
    target.write_text(text, encoding="utf-8")
    return target


def load_classifiers(path: str | Path) -> Tuple[List[LogisticClassifier], List[str]]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        ckpt = LogisticCheckpoint.model_validate(raw)
    except ValidationError as e:
        err = e.errors()[0]
        raise ConfigError(err["msg"], path=".".join(str(p) for p in err["loc"])) from e
    return ckpt.to_models(), [p.name for p in ckpt.labels]
