from .ddim import DdimSampler, ddim_sample, ddim_step, diffuse, forward_noising, predict_x0
from .denoisers import AnalyticGmmDenoiser, DenoiserModel, analytic_gmm_denoiser
from .mlp import (
    DenoiserTrainConfig,
    MlpCheckpoint,
    MlpDenoiser,
    load_checkpoint,
    save_checkpoint,
    timestep_embedding,
    train_mlp_denoiser,
)
from .schedule import NoiseSchedule, ScheduleConfig

__all__ = [
    "AnalyticGmmDenoiser",
    "DdimSampler",
    "DenoiserModel",
    "DenoiserTrainConfig",
    "MlpCheckpoint",
    "MlpDenoiser",
    "NoiseSchedule",
    "ScheduleConfig",
    "analytic_gmm_denoiser",
    "ddim_sample",
    "ddim_step",
    "diffuse",
    "forward_noising",
    "load_checkpoint",
    "predict_x0",
    "save_checkpoint",
    "timestep_embedding",
    "train_mlp_denoiser",
]
