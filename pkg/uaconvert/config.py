from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Type, TypeVar

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .calibrate.selective import CalibrationConfig
from .classify.logistic import LogisticTrainConfig
from .diffusion.mlp import DenoiserTrainConfig
from .diffusion.schedule import ScheduleConfig
from .errors import ConfigError
from .sigproc.filters import PreprocessSteps
from .toyworld.gmm import GmmWorld, load_world, make_world

MAX_SEED = 2**64 - 1


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class WorldSource(_Section):
    """A world JSON file, or the parameters of a generated example world."""

    path: Optional[str] = None
    dim: int = Field(2, ge=1)
    n_components: int = Field(4, ge=2)
    separation: float = Field(2.0, gt=0)
    spread: float = Field(0.5, gt=0)
    channel_sigma: float = Field(1.0, ge=0)

    def build(self) -> GmmWorld:
        if self.path:
            return load_world(self.path)
        return make_world(
            dim=self.dim,
            n_components=self.n_components,
            separation=self.separation,
            spread=self.spread,
            channel_sigma=self.channel_sigma,
        )


SamplerKind = Literal["exact", "ddim_analytic"]


class CommandConfig(_Section):
    """Fields shared by every command; `workers` never changes results."""

    seed: int = Field(0, ge=0, le=MAX_SEED)
    workers: int = Field(1, ge=1)
    plots: bool = True

    def config_hash(self) -> str:
        payload = json.dumps(self.hashed_dump(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]

    def hashed_dump(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", exclude={"workers"})


class TrainedPipeline(_Section):
    """DDIM with a trained denoiser plus logistic f_X / f_Y, all fitted on fresh world draws."""

    enabled: bool = False
    n_train: int = Field(5000, ge=10)
    n_items: int = Field(200, ge=2)
    K: int = Field(20, ge=1)
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    denoiser: DenoiserTrainConfig = Field(default_factory=DenoiserTrainConfig)
    classifier: LogisticTrainConfig = Field(
        default_factory=lambda: LogisticTrainConfig(features="quadratic")
    )


class ToyworldConfig(CommandConfig):
    world: WorldSource = Field(default_factory=WorldSource)
    n_items: int = Field(1000, ge=2)
    K: int = Field(100, ge=1)
    sampler: SamplerKind = "exact"
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    decision_threshold: float = Field(0.5, ge=0, le=1)
    synth_y: bool = True
    trained: TrainedPipeline = Field(default_factory=TrainedPipeline)


class DenoiserSpec(_Section):
    kind: Literal["exact", "analytic", "checkpoint"] = "analytic"
    checkpoint: Optional[str] = None
    ddim_stride: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _checkpoint_path(self) -> "DenoiserSpec":
        if self.kind == "checkpoint" and not self.checkpoint:
            raise ValueError("kind 'checkpoint' needs a checkpoint path")
        return self


class ConvertConfig(CommandConfig):
    """Observations come from `dataset` (CSV) or, without one, from `n_items` world draws."""

    dataset: Optional[str] = None
    truths: Optional[str] = None
    world: Optional[WorldSource] = None
    n_items: int = Field(50, ge=1)
    K: int = Field(100, ge=1)
    denoiser: DenoiserSpec = Field(default_factory=DenoiserSpec)

    @model_validator(mode="after")
    def _sources(self) -> "ConvertConfig":
        if self.denoiser.kind in ("exact", "analytic") and self.world is None:
            raise ValueError(f"denoiser kind '{self.denoiser.kind}' requires a world")
        if self.dataset is None and self.world is None:
            raise ValueError("either dataset or world must be given")
        return self


class TrainConfig(CommandConfig):
    """Paired training data from `dataset_x`/`dataset_y` CSVs, or `n_train` world draws."""

    world: Optional[WorldSource] = None
    dataset_x: Optional[str] = None
    dataset_y: Optional[str] = None
    n_train: int = Field(5000, ge=10)
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    denoiser: Optional[DenoiserTrainConfig] = Field(default_factory=DenoiserTrainConfig)
    classifier_x: Optional[LogisticTrainConfig] = None
    classifier_y: Optional[LogisticTrainConfig] = None

    @model_validator(mode="after")
    def _sources(self) -> "TrainConfig":
        paired = self.dataset_x is not None and self.dataset_y is not None
        if self.world is None and not paired:
            raise ValueError("either world or both dataset_x and dataset_y must be given")
        return self


class AuditSection(_Section):
    n_trials: int = Field(500, ge=100)
    m: int = Field(2000, ge=1)
    n_test: int = Field(20000, ge=1)
    pipeline: Literal["exact", "random"] = "exact"


class CalibrateConfig(CommandConfig):
    """
    Calibration scores come from `scores` (a CSV with `score` and `true_label`
    columns, e.g. a strategy export filtered by `strategy`/`label_index`) or
    from `n_calibration` exact-pipeline draws of `world`.
    """

    scores: Optional[str] = None
    strategy: Optional[str] = "ESC"
    label_index: int = Field(0, ge=0)
    world: Optional[WorldSource] = None
    n_calibration: int = Field(2000, ge=1)
    calibration: CalibrationConfig = Field(default_factory=CalibrationConfig)
    deploy_scores: Optional[str] = None
    audit: Optional[AuditSection] = None

    @model_validator(mode="after")
    def _sources(self) -> "CalibrateConfig":
        if self.scores is None and self.world is None:
            raise ValueError("either scores or world must be given")
        if self.audit is not None and self.world is None:
            raise ValueError("audit requires a world")
        return self


class UncertaintySection(_Section):
    n_items: int = Field(200, ge=1)
    K: int = Field(100, ge=3)
    pc_counts: List[int] = Field(default_factory=lambda: [0, 1, 2])
    coord_quantile: float = Field(0.9, ge=0, le=1)
    interval_mass: float = Field(0.9, ge=0, le=1)
    histogram_bins: int = Field(20, ge=1)
    containment_quantile: float = Field(0.99, ge=0, le=1)
    K_grid: List[int] = Field(default_factory=lambda: [1, 5, 25, 100])
    repeats: int = Field(10, ge=1)
    mi_samples: int = Field(100000, ge=100)
    mi_bins: int = Field(32, ge=2)


class MetricsConfig(CommandConfig):
    strategies: Optional[str] = None
    label_names: List[str] = Field(default_factory=list)
    world: Optional[WorldSource] = None
    uncertainty: UncertaintySection = Field(default_factory=UncertaintySection)

    @model_validator(mode="after")
    def _sources(self) -> "MetricsConfig":
        if self.strategies is None and self.world is None:
            raise ValueError("either strategies or world must be given")
        return self


class SelectConfig(CommandConfig):
    world: WorldSource = Field(default_factory=WorldSource)
    n_items: int = Field(200, ge=2)
    K: int = Field(100, ge=1)
    sampler: SamplerKind = "exact"
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    bins: int = Field(64, ge=2)
    decision_threshold: float = Field(0.5, ge=0, le=1)


class SynthSection(_Section):
    kind: Literal["spiky", "smooth"] = "spiky"
    n_signals: int = Field(4, ge=1)
    rate_hz: float = Field(250.0, gt=0)
    duration_s: float = Field(10.0, gt=0)
    beat_hz: float = Field(1.2, gt=0)
    jitter: float = Field(0.01, ge=0)
    noise: float = Field(0.05, ge=0)


class PreprocessConfig(CommandConfig):
    input: Optional[str] = None
    synth: SynthSection = Field(default_factory=SynthSection)
    steps: PreprocessSteps = Field(default_factory=PreprocessSteps)


class CycleConfig(CommandConfig):
    world: WorldSource = Field(default_factory=WorldSource)
    n_items: int = Field(200, ge=2)
    K: int = Field(50, ge=2)
    sampler: SamplerKind = "exact"
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)


COMMAND_CONFIGS: Dict[str, Type[CommandConfig]] = {
    "toyworld": ToyworldConfig,
    "convert": ConvertConfig,
    "train": TrainConfig,
    "calibrate": CalibrateConfig,
    "metrics": MetricsConfig,
    "select": SelectConfig,
    "preprocess": PreprocessConfig,
    "cycle": CycleConfig,
}

C = TypeVar("C", bound=CommandConfig)


def error_path(e: ValidationError) -> tuple[str, str]:
    err = e.errors()[0]
    return ".".join(str(p) for p in err["loc"]), err["msg"]


def load_config(
    path: Optional[str | Path], model: Type[C], overrides: Optional[Dict[str, Any]] = None
) -> C:
    """
    Read a YAML (or JSON) document and validate it into `model`. A missing path
    means all defaults. `overrides` (e.g. --seed / --workers) win over the file.
    """
    raw: Any = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as f:
            try:
                raw = yaml.safe_load(f)
            except yaml.YAMLError as e:
                raise ConfigError(f"not valid YAML/JSON: {e}") from e
        raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config document must be a mapping")
    raw = {**raw, **{k: v for k, v in (overrides or {}).items() if v is not None}}
    try:
        return model.model_validate(raw)
    except ValidationError as e:
        loc, msg = error_path(e)
        raise ConfigError(msg, path=loc) from e
