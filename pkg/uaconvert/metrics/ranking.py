from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True, eq=False)
class CurvePoints:
    """(x, y) pairs with x non-decreasing."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self) -> None:
        xs = np.array(self.xs, dtype=np.float64).reshape(-1)
        ys = np.array(self.ys, dtype=np.float64).reshape(-1)
        if xs.size != ys.size:
            raise ValueError(f"{xs.size} x values for {ys.size} y values")
        if np.any(np.diff(xs) < 0):
            raise ValueError("curve x values must be non-decreasing")
        xs.setflags(write=False)
        ys.setflags(write=False)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return int(self.xs.size)


def _binary_pair(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    y = np.asarray(labels).reshape(-1)
    if s.size != y.size:
        raise ValueError(f"{s.size} scores for {y.size} labels")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    if y.all() or not y.any():
        raise ValueError("both classes must be present")
    return s, y.astype(bool)


def auroc(scores, labels) -> float:
    """Mann-Whitney estimate of P(score_pos > score_neg); ties count one half."""
    s, y = _binary_pair(scores, labels)
    ranks = rankdata(s)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    u = ranks[y].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def roc_curve(scores, labels) -> CurvePoints:
    """(FPR, TPR) from (0, 0) to (1, 1); tied scores move in a single step."""
    s, y = _binary_pair(scores, labels)
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    tp = np.cumsum(y)
    fp = np.cumsum(~y)
    last_of_run = np.r_[np.diff(s) != 0, True]
    tpr = np.r_[0.0, tp[last_of_run] / y.sum()]
    fpr = np.r_[0.0, fp[last_of_run] / (~y).sum()]
    return CurvePoints(fpr, tpr)


def risk_coverage(decisions, labels, confidences) -> CurvePoints:
    """
    One point per item: sort by confidence (descending, ties by item index) and
    report the error rate among the top k at coverage k / n.
    """
    dec = np.asarray(decisions).reshape(-1)
    lab = np.asarray(labels).reshape(-1)
    conf = np.asarray(confidences, dtype=np.float64).reshape(-1)
    if not dec.size == lab.size == conf.size:
        raise ValueError("decisions, labels and confidences must have equal length")
    if dec.size == 0:
        raise ValueError("risk-coverage needs at least one item")
    order = np.argsort(-conf, kind="stable")
    wrong = (dec[order] != lab[order]).astype(np.float64)
    k = np.arange(1, dec.size + 1)
    return CurvePoints(k / dec.size, np.cumsum(wrong) / k)


def aurc(curve: CurvePoints) -> float:
    """Mean selective risk over the coverage points."""
    if len(curve) == 0:
        raise ValueError("empty curve")
    return float(np.mean(curve.ys))


@dataclass(frozen=True)
class ConfusionMetrics:
    tpr: float
    tnr: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int
    # metrics whose denominator was zero (reported as 0)
    undefined: Tuple[str, ...] = ()


def confusion_metrics(decisions, labels) -> ConfusionMetrics:
    dec = np.asarray(decisions).reshape(-1).astype(bool)
    lab = np.asarray(labels).reshape(-1).astype(bool)
    if dec.size != lab.size or dec.size == 0:
        raise ValueError("decisions and labels must be non-empty and of equal length")
    tp = int(np.sum(dec & lab))
    fp = int(np.sum(dec & ~lab))
    fn = int(np.sum(~dec & lab))
    tn = int(np.sum(~dec & ~lab))
    undefined = []

    def ratio(num: int, den: int, name: str) -> float:
        if den == 0:
            undefined.append(name)
            return 0.0
        return num / den

    tpr = ratio(tp, tp + fn, "tpr")
    tnr = ratio(tn, tn + fp, "tnr")
    f1 = ratio(2 * tp, 2 * tp + fp + fn, "f1")
    return ConfusionMetrics(tpr, tnr, f1, tp, fp, fn, tn, tuple(undefined))
