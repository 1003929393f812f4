from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import norm

from ..classify.base import ClassifierModel
from ..classify.esc import DEFAULT_THRESHOLD, decide, esc_score
from ..core.rng import RngStream
from ..core.schema import PosteriorEnsemble, ScoreSet, Signal
from ..metrics.distance import rmse, sample_frechet
from ..toyworld.gmm import JointSample
from ..toyworld.sampler import PosteriorSampler
from ..utils.parallel import ordered_map

logger = logging.getLogger(__name__)

KDE_BINS = 64
BANDWIDTH_FLOOR = 1e-3
TIE_TOL = 1e-12


class SelectionStrategy(str, Enum):
    MOST_LIKELY = "most_likely_score"
    EXPECTED = "expected_score"
    MINMAX = "minmax_score"


@dataclass(frozen=True, eq=False)
class FilteredEnsemble:
    """Ensemble members kept by the agreement filter; `indices` point into the ensemble."""

    samples: np.ndarray
    scores: np.ndarray
    indices: np.ndarray
    sample_rate_hz: float = 1.0
    fallback: bool = False

    def __len__(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True, eq=False)
class Selection:
    strategy: SelectionStrategy
    index: int  # into the full ensemble
    score: float
    signal: Signal

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "selected_index": self.index,
            "selected_score": self.score,
        }


@dataclass(frozen=True, eq=False)
class KdeEstimate:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def __post_init__(self) -> None:
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("KDE grid must be strictly increasing")
        if np.any(self.density < 0):
            raise ValueError("density must be non-negative")

    @property
    def mode(self) -> float:
        return float(self.grid[int(np.argmax(self.density))])


def agreement_filter(
    score_set: ScoreSet,
    ensemble: PosteriorEnsemble,
    esc_decision: int,
    decision_threshold: float = DEFAULT_THRESHOLD,
) -> FilteredEnsemble:
    """
    Members whose own decision equals the ESC decision. If none agree, the full
    ensemble is returned with `fallback` set.
    """
    scores = score_set.scores
    if scores.size != ensemble.K:
        raise ValueError(f"{scores.size} scores for an ensemble of {ensemble.K}")
    keep = np.flatnonzero((scores > decision_threshold).astype(int) == int(esc_decision))
    fallback = keep.size == 0
    if fallback:
        logger.warning("no ensemble member agrees with the ESC decision; using all %d", scores.size)
        keep = np.arange(scores.size)
    return FilteredEnsemble(
        samples=ensemble.samples[keep],
        scores=scores[keep],
        indices=keep,
        sample_rate_hz=ensemble.sample_rate_hz,
        fallback=fallback,
    )


def silverman_bandwidth(scores: np.ndarray) -> float:
    """1.06 * sd * k^(-1/5), floored."""
    s = np.asarray(scores, dtype=np.float64)
    sd = float(np.std(s, ddof=1)) if s.size > 1 else 0.0
    return max(1.06 * sd * s.size ** (-0.2), BANDWIDTH_FLOOR)


def kde(scores, bins: int = KDE_BINS, bandwidth: Optional[float] = None) -> KdeEstimate:
    """Gaussian-kernel density of the scores at the `bins` bin centres of [0, 1]."""
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    if s.size < 1:
        raise ValueError("kde needs at least one score")
    h = silverman_bandwidth(s) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    grid = (np.arange(bins) + 0.5) / bins
    density = norm.pdf(grid[:, None], loc=s[None, :], scale=h).mean(axis=1)
    return KdeEstimate(grid, density, h)


def _first_min(values: np.ndarray) -> int:
    return int(np.flatnonzero(values <= values.min() + TIE_TOL)[0])


def _pick(filtered: FilteredEnsemble, j: int, strategy: SelectionStrategy) -> Selection:
    return Selection(
        strategy=strategy,
        index=int(filtered.indices[j]),
        score=float(filtered.scores[j]),
        signal=Signal(filtered.samples[j], filtered.sample_rate_hz),
    )


def _require(filtered: FilteredEnsemble) -> None:
    if len(filtered) == 0:
        raise ValueError("selection needs a non-empty ensemble")


def most_likely_score_ecg(filtered: FilteredEnsemble, kde_estimate: KdeEstimate) -> Selection:
    """Member whose score is nearest the KDE mode bin centre."""
    _require(filtered)
    j = _first_min(np.abs(filtered.scores - kde_estimate.mode))
    return _pick(filtered, j, SelectionStrategy.MOST_LIKELY)


def expected_score_ecg(filtered: FilteredEnsemble) -> Selection:
    """Member whose score is nearest the mean score."""
    _require(filtered)
    j = _first_min(np.abs(filtered.scores - filtered.scores.mean()))
    return _pick(filtered, j, SelectionStrategy.EXPECTED)


def minmax_score_ecg(filtered: FilteredEnsemble, esc_decision: int) -> Selection:
    """Highest score for a positive decision, lowest otherwise."""
    _require(filtered)
    values = -filtered.scores if esc_decision == 1 else filtered.scores
    return _pick(filtered, _first_min(values), SelectionStrategy.MINMAX)


def select_representatives(
    ensemble: PosteriorEnsemble,
    classifier: ClassifierModel,
    decision_threshold: float = DEFAULT_THRESHOLD,
    bins: int = KDE_BINS,
) -> tuple[Dict[SelectionStrategy, Selection], FilteredEnsemble]:
    """Run all three selectors on one ensemble after the agreement filter."""
    score, score_set = esc_score(ensemble, classifier)
    decision = decide(score, decision_threshold)
    filtered = agreement_filter(score_set, ensemble, decision, decision_threshold)
    picks = {
        SelectionStrategy.MOST_LIKELY: most_likely_score_ecg(filtered, kde(filtered.scores, bins)),
        SelectionStrategy.EXPECTED: expected_score_ecg(filtered),
        SelectionStrategy.MINMAX: minmax_score_ecg(filtered, decision),
    }
    return picks, filtered


def selection_quality(
    sampler: PosteriorSampler,
    classifier: ClassifierModel,
    items: JointSample,
    K: int,
    stream: RngStream,
    decision_threshold: float = DEFAULT_THRESHOLD,
    bins: int = KDE_BINS,
    workers: int = 1,
) -> Dict[str, Dict[str, float]]:
    """
    Compare the selectors against the ground truths: mean RMSE of each
    strategy's pick and the FD between its picks and the truths. Item i draws
    its ensemble from `stream.child(i)`.
    """

    def run(i: int) -> Dict[SelectionStrategy, Selection]:
        ens = sampler.sample(items.y[i], stream.child(i), K)
        return select_representatives(ens, classifier, decision_threshold, bins)[0]

    picks: List[Dict[SelectionStrategy, Selection]] = ordered_map(run, range(len(items)), workers)
    return quality_table(picks, items.x)


def quality_table(
    picks: Sequence[Dict[SelectionStrategy, Selection]], truths: np.ndarray
) -> Dict[str, Dict[str, float]]:
    """Per strategy: mean RMSE of the picks to the truths and FD of picks vs truths."""
    truths = np.atleast_2d(np.asarray(truths, dtype=np.float64))
    table: Dict[str, Dict[str, float]] = {}
    for strategy in SelectionStrategy:
        chosen = stack_selections([p[strategy] for p in picks])
        errors = [rmse(c, g) for c, g in zip(chosen, truths)]
        table[strategy.value] = {
            "rmse": float(np.mean(errors)),
            "fd_1": sample_frechet(chosen, truths) if len(picks) > 1 else float("nan"),
        }
    return table


def best_strategy(table: Dict[str, Dict[str, float]], metric: str = "rmse") -> str:
    return min(table, key=lambda k: table[k][metric])


def stack_selections(selections: Sequence[Selection]) -> np.ndarray:
    return np.stack([s.signal.values for s in selections])
