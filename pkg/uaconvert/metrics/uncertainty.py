from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist, pdist

from ..classify.base import ClassifierModel
from ..classify.esc import decide_all, esc_score
from ..core.rng import RngStream
from ..core.schema import PosteriorEnsemble, ScoreSet
from ..toyworld.gmm import JointSample
from ..toyworld.sampler import PosteriorSampler
from ..utils.parallel import ordered_map
from .ranking import CurvePoints

logger = logging.getLogger(__name__)


def _samples(e) -> np.ndarray:
    return e.samples if isinstance(e, PosteriorEnsemble) else np.atleast_2d(e)


def _pca_errors(samples: np.ndarray, truth: np.ndarray, max_pc: int, q: float) -> np.ndarray:
    """Coordinate-quantile residual of `truth` using the top 0..max_pc components."""
    mean = samples.mean(axis=0)
    _, sing, vt = np.linalg.svd(samples - mean, full_matrices=False)
    # drop zero-variance directions
    rank = int(np.sum(sing > 1e-12 * max(1.0, float(sing.max(initial=0.0)))))
    r = truth - mean
    errs = np.empty(max_pc + 1)
    for n in range(max_pc + 1):
        basis = vt[: min(n, rank)]
        resid = r - basis.T @ (basis @ r)
        errs[n] = np.quantile(np.abs(resid), q)
    return np.minimum.accumulate(errs)


def pca_uncertainty_curve(
    ensembles: Sequence,
    truths: np.ndarray,
    pc_counts: Sequence[int],
    coord_quantile: float = 0.9,
) -> CurvePoints:
    """
    Error of the best reconstruction of each centred ground truth from at most
    n principal components of its ensemble, taken as the `coord_quantile`
    quantile of absolute per-coordinate residuals; averaged over items.
    """
    counts = np.asarray(sorted(set(int(c) for c in pc_counts)))
    if counts.size == 0 or counts[0] < 0:
        raise ValueError("pc_counts must be non-empty and non-negative")
    truths = np.atleast_2d(np.asarray(truths, dtype=np.float64))
    max_pc = int(counts[-1])
    per_item = []
    for e, g in zip(ensembles, truths):
        s = _samples(e)
        if s.shape[0] <= max_pc:
            raise ValueError(f"ensemble size {s.shape[0]} must exceed the PC count {max_pc}")
        per_item.append(_pca_errors(s, g, max_pc, coord_quantile))
    curve = np.mean(per_item, axis=0)
    return CurvePoints(counts.astype(np.float64), curve[counts])


def score_interval_sizes(score_sets: Sequence[ScoreSet], mass: float = 0.9) -> List[float]:
    """Width of the central `mass` interval of each score set (linear quantiles)."""
    if not 0.0 <= mass <= 1.0:
        raise ValueError(f"mass must lie in [0, 1], got {mass}")
    lo, hi = 0.5 - mass / 2.0, 0.5 + mass / 2.0
    out = []
    for s in score_sets:
        scores = s.scores if isinstance(s, ScoreSet) else np.asarray(s, dtype=np.float64)
        q_lo, q_hi = np.quantile(scores, [lo, hi])
        out.append(float(q_hi - q_lo))
    return out


def histogram(values: Sequence[float], bins: int = 20, value_range=(0.0, 1.0)):
    arr = np.asarray(values, dtype=np.float64)
    counts, edges = np.histogram(arr, bins=bins, range=value_range)
    return edges, counts


@dataclass(frozen=True, eq=False)
class Containment:
    fraction: float
    contained: np.ndarray
    nearest: np.ndarray
    radius: np.ndarray


def ensemble_containment(
    ensembles: Sequence, truths: np.ndarray, histogram_quantile: float = 0.99
) -> Containment:
    """
    An item is contained when the distance from its ground truth to the nearest
    ensemble member is within the `histogram_quantile` quantile of the
    ensemble's pairwise distances.
    """
    truths = np.atleast_2d(np.asarray(truths, dtype=np.float64))
    n = truths.shape[0]
    nearest = np.empty(n)
    radius = np.empty(n)
    for i, (e, g) in enumerate(zip(ensembles, truths)):
        s = _samples(e)
        if s.shape[0] < 3:
            raise ValueError(f"containment needs K >= 3, got {s.shape[0]}")
        radius[i] = np.quantile(pdist(s), histogram_quantile)
        nearest[i] = cdist(g[None, :], s).min()
    contained = nearest <= radius
    return Containment(float(contained.mean()), contained, nearest, radius)


@dataclass(frozen=True)
class ConvergenceCurves:
    gap: CurvePoints  # ORIGINAL_X accuracy minus ESC accuracy, vs K
    score_std: CurvePoints  # std of the ESC score across repeats, mean over items


def esc_convergence_curve(
    sampler: PosteriorSampler,
    classifier: ClassifierModel,
    items: JointSample,
    K_grid: Sequence[int],
    repeats: int,
    stream: RngStream,
    decision_threshold: float = 0.5,
    workers: int = 1,
) -> ConvergenceCurves:
    """
    ESC accuracy gap and ESC score spread as functions of K. Repeat r of
    K_grid[k] for item i draws its ensemble from `stream.child(k, r, i)`.
    """
    grid = [int(k) for k in K_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise ValueError("K_grid must be a strictly increasing list of positive counts")
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    c = np.asarray(items.c).reshape(-1)
    acc_x = float(np.mean(decide_all(classifier.score_batch(items.x), decision_threshold) == c))

    gaps, stds = [], []
    for k_idx, K in enumerate(grid):

        def run(job: Tuple[int, int]) -> float:
            r, i = job
            ens = sampler.sample(items.y[i], stream.child(k_idx, r, i), K)
            return esc_score(ens, classifier)[0]

        jobs = [(r, i) for r in range(repeats) for i in range(len(items))]
        scores = np.asarray(ordered_map(run, jobs, workers)).reshape(repeats, len(items))
        acc = np.mean(decide_all(scores, decision_threshold) == c[None, :], axis=1)
        gaps.append(float(acc_x - acc.mean()))
        stds.append(float(scores.std(axis=0, ddof=1).mean()) if repeats > 1 else 0.0)
        logger.debug("K=%d: gap=%.4f score_std=%.4f", K, gaps[-1], stds[-1])
    xs = np.asarray(grid, dtype=np.float64)
    return ConvergenceCurves(CurvePoints(xs, gaps), CurvePoints(xs, stds))

