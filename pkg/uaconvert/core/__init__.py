from .dataset import SignalDataset, read_dataset, write_dataset
from .rng import RngStream, gaussian_draw
from .schema import LabeledSignal, PosteriorEnsemble, ScoreSet, Signal

__all__ = [
    "LabeledSignal",
    "PosteriorEnsemble",
    "RngStream",
    "ScoreSet",
    "Signal",
    "SignalDataset",
    "gaussian_draw",
    "read_dataset",
    "write_dataset",
]
