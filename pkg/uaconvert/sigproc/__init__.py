from .filters import (
    PreprocessSteps,
    butterworth_bandpass_zerophase,
    detrend,
    preprocess,
    resample,
    znormalize,
)
from .synth import synth_quasiperiodic

__all__ = [
    "PreprocessSteps",
    "butterworth_bandpass_zerophase",
    "detrend",
    "preprocess",
    "resample",
    "synth_quasiperiodic",
    "znormalize",
]
