from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.rng import RngStream
from ..core.schema import ScoreSet
from ..errors import DatasetError
from ..toyworld.sampler import PosteriorSampler
from ..utils.output import write_csv
from ..utils.parallel import ordered_map
from .base import ClassifierModel
from .esc import DEFAULT_THRESHOLD, decide_all, esc_score, ssc_mean_score, ssc_random_score

logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    ORIGINAL_X = "ORIGINAL_X"
    ORIGINAL_Y = "ORIGINAL_Y"
    SYNTH_Y = "SYNTH_Y"
    SSC_MEAN = "SSC_MEAN"
    SSC_RANDOM = "SSC_RANDOM"
    ESC = "ESC"


@dataclass(frozen=True, eq=False)
class StrategyResult:
    """Scores and decisions of one strategy on one label across all items."""

    strategy: Strategy
    label_index: int
    scores: np.ndarray
    decisions: np.ndarray
    true_labels: np.ndarray
    score_sets: Optional[List[ScoreSet]] = None

    def __post_init__(self) -> None:
        if np.any((self.scores < 0.0) | (self.scores > 1.0)):
            raise ValueError(f"{self.strategy.value} scores must lie in [0, 1]")

    @property
    def correct(self) -> np.ndarray:
        return (self.decisions == self.true_labels).astype(np.int8)

    @property
    def confidences(self) -> np.ndarray:
        return np.maximum(self.scores, 1.0 - self.scores)


@dataclass
class _ItemScores:
    esc: np.ndarray
    ssc_mean: np.ndarray
    ssc_random: np.ndarray
    synth_y: Optional[np.ndarray]
    score_sets: List[ScoreSet]


def strategy_harness(
    x: np.ndarray,
    y: np.ndarray,
    labels: np.ndarray,
    sampler: PosteriorSampler,
    classifiers_x: Sequence[ClassifierModel],
    classifiers_y: Sequence[ClassifierModel],
    K: int,
    stream: RngStream,
    reverse_sampler: Optional[PosteriorSampler] = None,
    decision_threshold: float = DEFAULT_THRESHOLD,
    workers: int = 1,
) -> List[StrategyResult]:
    """
    Score every paired item (x_i, y_i, labels_i) under each strategy, one
    classifier pair per label. Item i draws from `stream.child(i)`: its
    ensemble from child 0, the SSC_RANDOM pick for label l from child (1, l)
    and the reverse draw for SYNTH_Y from child 2. SYNTH_Y is only produced
    when a reverse sampler is given.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    lab = np.asarray(labels, dtype=np.int8)
    lab = lab[:, None] if lab.ndim == 1 else lab
    n, n_labels = lab.shape
    if x.shape[0] != n or y.shape[0] != n:
        raise ValueError("x, y and labels must have the same number of items")
    if len(classifiers_x) != n_labels or len(classifiers_y) != n_labels:
        raise ValueError(f"need one X and one Y classifier per label ({n_labels})")

    def run_item(i: int) -> _ItemScores:
        s = stream.child(i)
        ensemble = sampler.sample(y[i], s.child(0), K)
        esc = np.empty(n_labels)
        mean = np.empty(n_labels)
        rand = np.empty(n_labels)
        sets = []
        for j in range(n_labels):
            esc[j], score_set = esc_score(ensemble, classifiers_x[j])
            sets.append(score_set)
            mean[j] = ssc_mean_score(ensemble, classifiers_x[j])
            rand[j] = ssc_random_score(ensemble, s.child(1, j), classifiers_x[j])
        synth = None
        if reverse_sampler is not None:
            y_hat = reverse_sampler.sample(x[i], s.child(2), 1).samples[0]
            synth = np.array([classifiers_y[j].score(y_hat) for j in range(n_labels)])
        return _ItemScores(esc, mean, rand, synth, sets)

    items = ordered_map(run_item, range(n), workers)
    logger.info("scored %d items x %d labels (K=%d)", n, n_labels, K)

    results: List[StrategyResult] = []
    for j in range(n_labels):
        per_strategy = {
            Strategy.ORIGINAL_X: classifiers_x[j].score_batch(x),
            Strategy.ORIGINAL_Y: classifiers_y[j].score_batch(y),
        }
        if reverse_sampler is not None:
            per_strategy[Strategy.SYNTH_Y] = np.array([it.synth_y[j] for it in items])
        per_strategy[Strategy.SSC_MEAN] = np.array([it.ssc_mean[j] for it in items])
        per_strategy[Strategy.SSC_RANDOM] = np.array([it.ssc_random[j] for it in items])
        per_strategy[Strategy.ESC] = np.array([it.esc[j] for it in items])
        for strategy, scores in per_strategy.items():
            results.append(
                StrategyResult(
                    strategy=strategy,
                    label_index=j,
                    scores=scores,
                    decisions=decide_all(scores, decision_threshold),
                    true_labels=lab[:, j].copy(),
                    score_sets=(
                        [it.score_sets[j] for it in items] if strategy is Strategy.ESC else None
                    ),
                )
            )
    return results


def find_result(
    results: Sequence[StrategyResult], strategy: Strategy, label_index: int = 0
) -> StrategyResult:
    for r in results:
        if r.strategy is strategy and r.label_index == label_index:
            return r
    raise KeyError(f"no {strategy.value} result for label {label_index}")


def write_strategy_csv(path: str | Path, results: Sequence[StrategyResult]) -> Path:
    header = ["item_index", "strategy", "label_index", "score", "decision", "true_label"]
    rows = (
        (i, r.strategy.value, r.label_index, r.scores[i], r.decisions[i], r.true_labels[i])
        for r in results
        for i in range(r.scores.size)
    )
    return write_csv(path, header, rows)


def read_strategy_csv(path: str | Path) -> List[StrategyResult]:
    """Inverse of write_strategy_csv (score sets are not stored)."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise DatasetError(f"{path}: no strategy rows")
    groups: Dict[Tuple[str, int], List[dict]] = {}
    for i, row in enumerate(rows):
        try:
            key = (Strategy(row["strategy"]).value, int(row["label_index"]))
        except (KeyError, ValueError) as e:
            raise DatasetError(f"bad strategy row: {e}", row=i) from e
        groups.setdefault(key, []).append(row)
    results = []
    for (strategy, label_index), group in groups.items():
        group.sort(key=lambda r: int(r["item_index"]))
        results.append(
            StrategyResult(
                strategy=Strategy(strategy),
                label_index=label_index,
                scores=np.array([float(r["score"]) for r in group]),
                decisions=np.array([int(r["decision"]) for r in group], dtype=np.int8),
                true_labels=np.array([int(r["true_label"]) for r in group], dtype=np.int8),
            )
        )
    return results
