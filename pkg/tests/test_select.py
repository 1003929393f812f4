import numpy as np
import pytest

from uaconvert.classify import ClassifierModel, ExactGmmClassifier
from uaconvert.core import PosteriorEnsemble, ScoreSet, Signal
from uaconvert.select import (
    FilteredEnsemble,
    SelectionStrategy,
    agreement_filter,
    best_strategy,
    expected_score_ecg,
    kde,
    minmax_score_ecg,
    most_likely_score_ecg,
    select_representatives,
    selection_quality,
    silverman_bandwidth,
)
from uaconvert.toyworld import ExactPosteriorSampler, sample_joint


class FirstCoordinate(ClassifierModel):
    def score_batch(self, x):
        return np.clip(np.atleast_2d(x)[:, 0], 0.0, 1.0)


def _filtered(scores) -> FilteredEnsemble:
    s = np.asarray(scores, dtype=float)
    return FilteredEnsemble(samples=s[:, None], scores=s, indices=np.arange(s.size))


def _ensemble(scores) -> PosteriorEnsemble:
    return PosteriorEnsemble(Signal([0.0]), np.asarray(scores, dtype=float)[:, None])


def test_agreement_filter_keeps_agreeing_members():
    scores = [0.2, 0.7, 0.4, 0.9]
    out = agreement_filter(ScoreSet(scores), _ensemble(scores), esc_decision=0)
    assert out.scores.tolist() == [0.2, 0.4]
    assert out.indices.tolist() == [0, 2]
    assert not out.fallback


def test_agreement_filter_falls_back_to_full_ensemble():
    scores = [0.6, 0.7]
    out = agreement_filter(ScoreSet(scores), _ensemble(scores), esc_decision=0)
    assert out.fallback and len(out) == 2


def test_agreement_filter_checks_sizes():
    with pytest.raises(ValueError):
        agreement_filter(ScoreSet([0.1, 0.2]), _ensemble([0.1]), 0)


def test_kde_is_symmetric_for_symmetric_scores():
    est = kde([0.2, 0.8], bins=64, bandwidth=0.05)
    assert np.allclose(est.density, est.density[::-1])
    assert est.grid[0] == pytest.approx(0.5 / 64)


def test_silverman_bandwidth_floor():
    assert silverman_bandwidth(np.full(5, 0.3)) == 1e-3
    assert silverman_bandwidth([0.4]) == 1e-3


def test_most_likely_picks_the_dense_cluster():
    filtered = _filtered([0.1, 0.1, 0.1, 0.9])
    pick = most_likely_score_ecg(filtered, kde(filtered.scores))
    assert pick.index == 0 and pick.score == 0.1
    assert pick.strategy is SelectionStrategy.MOST_LIKELY


def test_expected_score_picks_nearest_mean():
    pick = expected_score_ecg(_filtered([0.2, 0.4, 0.6]))
    assert pick.score == pytest.approx(0.4) and pick.index == 1


def test_equidistant_members_resolve_to_lowest_index():
    pick = expected_score_ecg(_filtered([0.3, 0.5]))
    assert pick.index == 0


def test_minmax_follows_the_decision():
    filtered = _filtered([0.6, 0.95, 0.7, 0.95])
    assert minmax_score_ecg(filtered, 1).index == 1
    assert minmax_score_ecg(filtered, 0).index == 0


def test_selectors_refuse_empty_input():
    empty = FilteredEnsemble(np.zeros((0, 1)), np.zeros(0), np.zeros(0, dtype=int))
    with pytest.raises(ValueError):
        expected_score_ecg(empty)


def test_select_representatives_reports_full_ensemble_indices():
    ens = _ensemble([0.1, 0.8, 0.3, 0.9, 0.95])
    picks, filtered = select_representatives(ens, FirstCoordinate())
    # ESC score 0.61 -> positive; members 1, 3 and 4 agree
    assert filtered.indices.tolist() == [1, 3, 4]
    assert picks[SelectionStrategy.MINMAX].index == 4
    assert all(p.index in (1, 3, 4) for p in picks.values())


def test_selection_quality_table(example_world_2d, stream):
    items = sample_joint(example_world_2d, stream(1), 8)
    table = selection_quality(
        ExactPosteriorSampler(example_world_2d),
        ExactGmmClassifier(example_world_2d, "x"),
        items,
        16,
        stream(2),
        workers=2,
    )
    assert set(table) == {s.value for s in SelectionStrategy}
    assert all(np.isfinite(row["rmse"]) and row["rmse"] >= 0 for row in table.values())
    assert best_strategy(table) in table
