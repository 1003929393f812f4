from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..classify.esc import DEFAULT_THRESHOLD, decide_all

logger = logging.getLogger(__name__)

FAILED = "FAILED"


def default_grid() -> List[float]:
    return np.linspace(0.5, 1.0, 101).tolist()


class CalibrationConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    alpha: float = Field(0.1, gt=0, le=1)
    delta: float = Field(0.1, gt=0, lt=1)
    lambda_grid: List[float] = Field(default_factory=default_grid)
    decision_threshold: float = Field(DEFAULT_THRESHOLD, ge=0, le=1)

    @field_validator("lambda_grid")
    @classmethod
    def _grid(cls, v: List[float]) -> List[float]:
        if not v:
            raise ValueError("lambda_grid must not be empty")
        arr = np.asarray(v, dtype=np.float64)
        if np.any(np.diff(arr) <= 0):
            raise ValueError("lambda_grid must be strictly increasing")
        if arr[0] < 0 or arr[-1] > 1:
            raise ValueError("lambda_grid must lie within [0, 1]")
        return v


@dataclass(frozen=True)
class BoundPoint:
    lambda_: float
    risk: Optional[float]  # None: empty selection
    bound: Optional[float]
    n_selected: int


@dataclass(frozen=True)
class CalibrationOutcome:
    """Chosen threshold (None when calibration failed) and the per-lambda bound trace."""

    lambda_hat: Optional[float]
    alpha: float
    delta: float
    m: int
    coverage: float
    trace: List[BoundPoint] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.lambda_hat is None

    def to_report(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "delta": self.delta,
            "m": self.m,
            "lambda_hat": FAILED if self.failed else self.lambda_hat,
            "coverage": self.coverage,
            "trace": [
                {"lambda": p.lambda_, "risk": p.risk, "bound": p.bound, "n_selected": p.n_selected}
                for p in self.trace
            ],
        }


def confidence(score):
    """kappa = max(score, 1 - score); float in, float out, arrays elementwise."""
    s = np.asarray(score, dtype=np.float64)
    if np.any((s < 0.0) | (s > 1.0)):
        raise ValueError("scores must lie in [0, 1]")
    k = np.maximum(s, 1.0 - s)
    return float(k) if k.ndim == 0 else k


def empirical_selective_risk(
    decisions: np.ndarray, true_labels: np.ndarray, confidences: np.ndarray, lam: float
) -> Tuple[Optional[float], int]:
    """Error rate among items with confidence > lam; (None, 0) when nothing is selected."""
    dec = np.asarray(decisions)
    lab = np.asarray(true_labels)
    conf = np.asarray(confidences, dtype=np.float64)
    if not dec.shape == lab.shape == conf.shape:
        raise ValueError("decisions, true_labels and confidences must have equal length")
    sel = conf > lam
    n_sel = int(sel.sum())
    if n_sel == 0:
        return None, 0
    return float(np.mean(dec[sel] != lab[sel])), n_sel


def hoeffding_radius(m: int, delta: float) -> float:
    """sqrt(ln(1/delta) / (2m))."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    return math.sqrt(math.log(1.0 / delta) / (2.0 * m))


def calibrate_lambda(
    scores: np.ndarray, true_labels: np.ndarray, config: CalibrationConfig
) -> CalibrationOutcome:
    """
    Smallest grid lambda whose upper bound R(lambda) + r_delta(m) is below alpha,
    with m the full calibration-set size. Empty selections never qualify.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    lab = np.asarray(true_labels).reshape(-1)
    m = s.size
    if m == 0:
        raise ValueError("calibration set is empty")
    decisions = decide_all(s, config.decision_threshold)
    conf = confidence(s)
    radius = hoeffding_radius(m, config.delta)

    trace: List[BoundPoint] = []
    lambda_hat: Optional[float] = None
    for lam in config.lambda_grid:
        risk, n_sel = empirical_selective_risk(decisions, lab, conf, lam)
        bound = None if risk is None else risk + radius
        trace.append(BoundPoint(float(lam), risk, bound, n_sel))
        if lambda_hat is None and bound is not None and bound < config.alpha:
            lambda_hat = float(lam)

    if lambda_hat is None:
        logger.warning("calibration failed: no lambda certifies alpha=%g (m=%d)", config.alpha, m)
        coverage = 0.0
    else:
        coverage = float(np.mean(conf > lambda_hat))
        logger.info("lambda_hat=%.4f coverage=%.4f (m=%d)", lambda_hat, coverage, m)
    return CalibrationOutcome(
        lambda_hat=lambda_hat,
        alpha=config.alpha,
        delta=config.delta,
        m=m,
        coverage=coverage,
        trace=trace,
    )


def select_reliable(confidences: np.ndarray, outcome: CalibrationOutcome) -> np.ndarray:
    """Accept mask at deployment: kappa > lambda_hat, nothing when calibration failed."""
    conf = np.asarray(confidences, dtype=np.float64)
    if outcome.failed:
        return np.zeros(conf.shape, dtype=bool)
    return conf > outcome.lambda_hat
