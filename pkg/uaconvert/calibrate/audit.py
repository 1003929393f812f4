from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from ..classify.esc import decide_all
from ..core.rng import RngStream
from ..toyworld.gmm import GmmWorld, JointSample, class_posterior_y, sample_joint
from ..utils.parallel import ordered_map
from .selective import (
    CalibrationConfig,
    calibrate_lambda,
    confidence,
    empirical_selective_risk,
)

logger = logging.getLogger(__name__)

# (joint sample, stream) -> f_Y scores for sample.y
Pipeline = Callable[[JointSample, RngStream], np.ndarray]

MIN_TRIALS = 100
_FAILED_TRIAL = object()


def exact_pipeline(world: GmmWorld) -> Pipeline:
    """Scores with the exact class posterior pi(C=1 | Y)."""

    def run(sample: JointSample, stream: RngStream) -> np.ndarray:
        return np.clip(class_posterior_y(world, sample.y), 0.0, 1.0)

    return run


def random_pipeline() -> Pipeline:
    """Uninformative scores, uniform on [0, 1]."""

    def run(sample: JointSample, stream: RngStream) -> np.ndarray:
        return stream.generator.random(len(sample))

    return run


@dataclass(frozen=True)
class AuditResult:
    n_trials: int
    n_failed: int
    n_valid: int
    validity_rate: float
    # true selective risk per non-failed trial (None: empty test selection)
    test_risks: List[Optional[float]]

    @property
    def failed_rate(self) -> float:
        return self.n_failed / self.n_trials


def audit_guarantee(
    world: GmmWorld,
    pipeline: Pipeline,
    config: CalibrationConfig,
    n_trials: int,
    stream: RngStream,
    m: int = 2000,
    n_test: int = 20000,
    workers: int = 1,
) -> AuditResult:
    """
    Repeat: draw fresh calibration (m) and test (n_test) sets from the world,
    calibrate, and measure the selective risk on the test set at lambda_hat.
    The validity rate is the share of non-failed trials with test risk < alpha
    (1.0 when every trial failed). An empty test selection counts as valid.
    """
    if n_trials < MIN_TRIALS:
        raise ValueError(f"n_trials must be >= {MIN_TRIALS}, got {n_trials}")

    def trial(t: int):
        s = stream.child(t)
        cal = sample_joint(world, s.child(0), m)
        outcome = calibrate_lambda(pipeline(cal, s.child(2)), cal.c, config)
        if outcome.failed:
            return _FAILED_TRIAL
        test = sample_joint(world, s.child(1), n_test)
        scores = pipeline(test, s.child(3))
        risk, _ = empirical_selective_risk(
            decide_all(scores, config.decision_threshold),
            test.c,
            confidence(scores),
            outcome.lambda_hat,
        )
        return risk

    outcomes = ordered_map(trial, range(n_trials), workers)
    risks = [r for r in outcomes if r is not _FAILED_TRIAL]
    n_valid = sum(1 for r in risks if r is None or r < config.alpha)
    rate = n_valid / len(risks) if risks else 1.0
    logger.info(
        "audit: %d trials, %d failed, validity %.4f (alpha=%g)",
        n_trials,
        n_trials - len(risks),
        rate,
        config.alpha,
    )
    return AuditResult(
        n_trials=n_trials,
        n_failed=n_trials - len(risks),
        n_valid=n_valid,
        validity_rate=rate,
        test_risks=risks,
    )
