from __future__ import annotations

from typing import Tuple

import numpy as np

from ..core.rng import RngStream
from ..core.schema import PosteriorEnsemble, ScoreSet
from .base import ClassifierModel

DEFAULT_THRESHOLD = 0.5


def esc_score(ensemble: PosteriorEnsemble, classifier: ClassifierModel) -> Tuple[float, ScoreSet]:
    """Expected Score Classifier: mean classifier score over the candidate cloud."""
    score_set = ScoreSet(classifier.score_batch(ensemble.samples))
    return score_set.mean(), score_set


def ssc_mean_score(ensemble: PosteriorEnsemble, classifier: ClassifierModel) -> float:
    """Single score of the coordinate-wise ensemble mean (MMSE estimate)."""
    return float(classifier.score(ensemble.mean()))


def ssc_random_score(
    ensemble: PosteriorEnsemble, stream: RngStream, classifier: ClassifierModel
) -> float:
    """Single score of one uniformly chosen ensemble member."""
    i = int(stream.generator.integers(ensemble.K))
    return float(classifier.score(ensemble.samples[i]))


def decide(score: float, decision_threshold: float = DEFAULT_THRESHOLD) -> int:
    """1 iff score > threshold (ties go to 0)."""
    if not 0.0 <= score <= 1.0:
        raise ValueError(f"score must lie in [0, 1], got {score}")
    return int(score > decision_threshold)


def decide_all(scores: np.ndarray, decision_threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    s = np.asarray(scores, dtype=np.float64)
    if np.any((s < 0.0) | (s > 1.0)):
        raise ValueError("scores must lie in [0, 1]")
    return (s > decision_threshold).astype(np.int8)
