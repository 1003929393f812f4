from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import List, Literal, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from scipy.special import expit

from ..core.rng import RngStream
from ..errors import ConfigError, TrainingError
from ..utils.training import Adam, LossTrace, diverged, split_validation
from .ddim import diffuse
from .denoisers import DenoiserModel
from .schedule import NoiseSchedule, ScheduleConfig

logger = logging.getLogger(__name__)


def timestep_embedding(steps: np.ndarray, width: int) -> np.ndarray:
    """Sinusoidal embedding of training-step indices -> (n, width)."""
    steps = np.asarray(steps, dtype=np.float64).reshape(-1, 1)
    half = width // 2
    freqs = np.exp(-np.log(10000.0) * np.arange(half) / max(half, 1))
    angles = steps * freqs[None, :]
    emb = np.concatenate([np.sin(angles), np.cos(angles)], axis=1)
    if width % 2:
        emb = np.concatenate([emb, np.zeros((emb.shape[0], 1))], axis=1)
    return emb


def _silu(z: np.ndarray) -> np.ndarray:
    return z * expit(z)


def _silu_grad(z: np.ndarray) -> np.ndarray:
    s = expit(z)
    return s * (1.0 + z * (1.0 - s))


class MlpDenoiser(DenoiserModel):
    """
    Fully connected noise predictor: [x_t, y, emb(t)] -> hidden (SiLU) ... -> d.
    Parameters are never mutated once the model is built; training works on copies.
    """

    def __init__(
        self,
        weights: Sequence[np.ndarray],
        biases: Sequence[np.ndarray],
        x_dim: int,
        y_dim: int,
        t_emb: int = 16,
    ) -> None:
        self.weights = [np.array(w, dtype=np.float64) for w in weights]
        self.biases = [np.array(b, dtype=np.float64) for b in biases]
        self.x_dim = int(x_dim)
        self.y_dim = int(y_dim)
        self.t_emb = int(t_emb)
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("need one bias per weight matrix")
        if self.weights[0].shape[0] != self.in_dim or self.weights[-1].shape[1] != self.x_dim:
            raise ValueError("layer shapes do not match input/output dimensions")
        for w, b in zip(self.weights, self.biases):
            if b.shape != (w.shape[1],):
                raise ValueError(f"bias shape {b.shape} does not match weight {w.shape}")
        for p in self.parameters:
            if not np.all(np.isfinite(p)):
                raise ValueError("parameters must be finite")
            p.setflags(write=False)

    @property
    def in_dim(self) -> int:
        return self.x_dim + self.y_dim + self.t_emb

    @property
    def parameters(self) -> List[np.ndarray]:
        out: List[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    @property
    def widths(self) -> List[int]:
        return [self.in_dim] + [w.shape[1] for w in self.weights]

    @classmethod
    def initialize(
        cls,
        x_dim: int,
        y_dim: int,
        hidden: Sequence[int] = (128, 128),
        t_emb: int = 16,
        stream: RngStream | None = None,
    ) -> "MlpDenoiser":
        stream = stream or RngStream(0)
        widths = [x_dim + y_dim + t_emb, *hidden, x_dim]
        weights, biases = [], []
        for fan_in, fan_out in zip(widths[:-1], widths[1:]):
            weights.append(stream.gaussian(fan_in, fan_out) * np.sqrt(1.0 / fan_in))
            biases.append(np.zeros(fan_out))
        return cls(weights, biases, x_dim, y_dim, t_emb)

    def with_parameters(self, params: Sequence[np.ndarray]) -> "MlpDenoiser":
        return MlpDenoiser(params[0::2], params[1::2], self.x_dim, self.y_dim, self.t_emb)

    # ---------------------------
    # Forward / backward
    # ---------------------------

    def features(self, x_t: np.ndarray, y: np.ndarray, steps) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x_t, dtype=np.float64))
        n = x.shape[0]
        cond = np.asarray(y, dtype=np.float64)
        cond = np.broadcast_to(cond.reshape(-1, self.y_dim), (n, self.y_dim))
        t = np.broadcast_to(np.asarray(steps).reshape(-1), (n,))
        return np.concatenate([x, cond, timestep_embedding(t, self.t_emb)], axis=1)

    def _forward(self, inp: np.ndarray) -> Tuple[np.ndarray, list]:
        cache = []
        h = inp
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            cache.append((h, z))
            h = z if i == last else _silu(z)
        return h, cache

    def predict(self, x_t: np.ndarray, y: np.ndarray, step_index: int) -> np.ndarray:
        x = np.asarray(x_t, dtype=np.float64)
        out, _ = self._forward(self.features(x, y, step_index))
        return out.reshape(x.shape)

    def loss_and_grads(self, inp: np.ndarray, target: np.ndarray) -> Tuple[float, List[np.ndarray]]:
        """Mean over the batch of ||target - out||^2 and its gradient per parameter."""
        out, cache = self._forward(inp)
        n = inp.shape[0]
        resid = out - target
        loss = float(np.sum(resid * resid) / n)
        grads: List[np.ndarray] = [None] * (2 * len(self.weights))  # type: ignore[list-item]
        dz = 2.0 * resid / n
        for i in range(len(self.weights) - 1, -1, -1):
            h_prev, _ = cache[i]
            grads[2 * i] = h_prev.T @ dz
            grads[2 * i + 1] = dz.sum(axis=0)
            if i > 0:
                dz = (dz @ self.weights[i].T) * _silu_grad(cache[i - 1][1])
        return loss, grads

    # ---------------------------
    # Checkpoints
    # ---------------------------

    def to_checkpoint(self, schedule: NoiseSchedule) -> "MlpCheckpoint":
        return MlpCheckpoint(
            x_dim=self.x_dim,
            y_dim=self.y_dim,
            t_emb=self.t_emb,
            layers=[
                LayerSpec(
                    rows=w.shape[0], cols=w.shape[1], weights=w.ravel().tolist(), bias=b.tolist()
                )
                for w, b in zip(self.weights, self.biases)
            ],
            schedule=schedule.to_config(),
        )


class DenoiserTrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hidden: List[int] = Field(default_factory=lambda: [128, 128])
    t_emb: int = Field(16, ge=2)
    epochs: int = Field(20, ge=0)
    batch_size: int = Field(128, ge=1)
    learning_rate: float = Field(1e-3, gt=0)
    validation_fraction: float = Field(0.1, ge=0, lt=1)
    max_loss: float = Field(1e6, gt=0)


def _noisy_batch(
    x0: np.ndarray, y: np.ndarray, schedule: NoiseSchedule, stream: RngStream, model: MlpDenoiser
) -> Tuple[np.ndarray, np.ndarray]:
    gen = stream.generator
    steps = gen.integers(0, schedule.n_train_steps, size=x0.shape[0])
    eps = gen.standard_normal(x0.shape)
    ab = schedule.alphas_bar[steps][:, None]
    x_t = diffuse(x0, eps, ab)
    return model.features(x_t, y, steps), eps


def train_mlp_denoiser(
    x0: np.ndarray,
    y: np.ndarray,
    schedule: NoiseSchedule,
    hyperparams: DenoiserTrainConfig,
    stream: RngStream,
) -> Tuple[MlpDenoiser, LossTrace]:
    """
    Fit eps(x_t, y, t) with the L2 noise-prediction loss and Adam.

    Streams: child(0) initial weights, child(1) validation split, child(2)
    fixed validation noise, child(3, epoch) per-epoch shuffling and noise.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=np.float64))
    if x0.size == 0:
        raise TrainingError("training set is empty", epoch=0)
    y = np.asarray(y, dtype=np.float64).reshape(x0.shape[0], -1)
    model = MlpDenoiser.initialize(
        x0.shape[1], y.shape[1], hyperparams.hidden, hyperparams.t_emb, stream.child(0)
    )
    trace = LossTrace()
    if hyperparams.epochs == 0:
        return model, trace

    tr_idx, va_idx = split_validation(x0.shape[0], hyperparams.validation_fraction, stream.child(1))
    if va_idx.size:
        va_inp, va_eps = _noisy_batch(x0[va_idx], y[va_idx], schedule, stream.child(2), model)

    params = [p.copy() for p in model.parameters]
    opt = Adam(params, lr=hyperparams.learning_rate)
    for epoch in range(1, hyperparams.epochs + 1):
        ep_stream = stream.child(3, epoch)
        order = tr_idx[ep_stream.generator.permutation(tr_idx.size)]
        work = model.with_parameters(params)
        inp, eps = _noisy_batch(x0[order], y[order], schedule, ep_stream, work)
        total = 0.0
        for start in range(0, order.size, hyperparams.batch_size):
            sl = slice(start, start + hyperparams.batch_size)
            loss, grads = work.loss_and_grads(inp[sl], eps[sl])
            if diverged(loss, hyperparams.max_loss):
                raise TrainingError(f"denoiser loss diverged ({loss})", epoch=epoch)
            opt.step(grads)
            work = model.with_parameters(params)
            total += loss * inp[sl].shape[0]
        train_loss = total / order.size
        val_loss = float("nan")
        if va_idx.size:
            val_loss, _ = work.loss_and_grads(va_inp, va_eps)
        trace.append(train_loss, val_loss)
        logger.info("denoiser epoch %d: train=%.5f val=%.5f", epoch, train_loss, val_loss)
    return model.with_parameters(params), trace


# ---------------------------
# Checkpoint documents
# ---------------------------


class LayerSpec(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    weights: List[float]
    bias: List[float]


class MlpCheckpoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["mlp_denoiser"] = "mlp_denoiser"
    x_dim: int = Field(ge=1)
    y_dim: int = Field(ge=1)
    t_emb: int = Field(ge=2)
    layers: List[LayerSpec]
    schedule: ScheduleConfig

    def to_model(self) -> Tuple[MlpDenoiser, NoiseSchedule]:
        weights, biases = [], []
        for i, layer in enumerate(self.layers):
            if len(layer.weights) != layer.rows * layer.cols:
                raise ConfigError(
                    f"{len(layer.weights)} weights for a {layer.rows}x{layer.cols} layer",
                    path=f"layers.{i}.weights",
                )
            if len(layer.bias) != layer.cols:
                raise ConfigError(
                    f"{len(layer.bias)} biases for {layer.cols} outputs", path=f"layers.{i}.bias"
                )
            weights.append(np.array(layer.weights).reshape(layer.rows, layer.cols))
            biases.append(np.array(layer.bias))
        try:
            model = MlpDenoiser(weights, biases, self.x_dim, self.y_dim, self.t_emb)
        except ValueError as e:
            raise ConfigError(f"checkpoint shape mismatch: {e}", path="layers") from e
        return model, self.schedule.build()


def save_checkpoint(path: str | Path, model: MlpDenoiser, schedule: NoiseSchedule) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    payload = model.to_checkpoint(schedule).model_dump(mode="json")
    target.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return target


def load_checkpoint(path: str | Path) -> Tuple[MlpDenoiser, NoiseSchedule]:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    try:
        ckpt = MlpCheckpoint.model_validate(raw)
    except ValidationError as e:
        err = e.errors()[0]
        raise ConfigError(err["msg"], path=".".join(str(p) for p in err["loc"])) from e
    return ckpt.to_model()
