from pathlib import Path

import numpy as np
import pytest

from uaconvert.classify import (
    ClassifierModel,
    ExactGmmClassifier,
    LogisticClassifier,
    LogisticTrainConfig,
    Strategy,
    balanced_batches,
    bce_loss_and_grad,
    decide,
    decide_all,
    esc_score,
    find_result,
    load_classifiers,
    read_strategy_csv,
    save_classifiers,
    ssc_mean_score,
    ssc_random_score,
    strategy_harness,
    train_logistic,
    write_strategy_csv,
)
from uaconvert.core import LabeledSignal, PosteriorEnsemble, Signal
from uaconvert.errors import DatasetError, SamplingError
from uaconvert.metrics import auroc
from uaconvert.toyworld import (
    ExactChannelSampler,
    ExactPosteriorSampler,
    class_posterior_y,
    sample_joint,
)


class FirstCoordinate(ClassifierModel):
    """Score = first coordinate, for hand-checked ensembles."""

    def score_batch(self, x):
        return np.clip(np.atleast_2d(x)[:, 0], 0.0, 1.0)


def _ensemble(values):
    samples = np.array(values, dtype=float).reshape(-1, 1)
    return PosteriorEnsemble(Signal([0.0]), samples)


def test_esc_is_mean_of_member_scores():
    score, score_set = esc_score(_ensemble([0.2, 0.4, 0.9]), FirstCoordinate())
    assert score == pytest.approx(0.5)
    assert score_set.scores.tolist() == [0.2, 0.4, 0.9]


def test_identical_members_score_like_a_single_sample():
    score, _ = esc_score(_ensemble([0.3, 0.3, 0.3]), FirstCoordinate())
    assert score == pytest.approx(FirstCoordinate().score(np.array([0.3])))


def test_single_member_strategies_agree(stream):
    ens = _ensemble([0.65])
    clf = FirstCoordinate()
    esc, _ = esc_score(ens, clf)
    assert ssc_mean_score(ens, clf) == esc
    assert ssc_random_score(ens, stream(0), clf) == esc


@pytest.mark.parametrize(
    "score, threshold, expected", [(0.5, 0.5, 0), (0.51, 0.5, 1), (0.0, 0.0, 0), (1.0, 0.5, 1)]
)
def test_decide_is_strict(score, threshold, expected):
    assert decide(score, threshold) == expected


def test_decide_rejects_scores_outside_unit_interval():
    with pytest.raises(ValueError):
        decide(1.2)
    with pytest.raises(ValueError):
        decide_all(np.array([0.2, -0.1]))


def test_exact_classifier_spaces(symmetric_world_1d):
    fx = ExactGmmClassifier(symmetric_world_1d, "x")
    fy = ExactGmmClassifier(symmetric_world_1d, "y")
    assert fx.score(np.array([0.0])) == pytest.approx(0.5)
    # the noisier Y-space posterior is less confident at the same point
    assert 0.5 < fy.score(np.array([1.0])) < fx.score(np.array([1.0]))
    assert fx.score(np.array([[1.0], [-1.0]])).shape == (2,)


def test_bce_gradient_matches_finite_differences(stream):
    gen = stream(1).generator
    phi = gen.standard_normal((12, 3))
    c = (gen.random(12) < 0.5).astype(float)
    w = gen.standard_normal(3)
    b = 0.3
    _, gw, gb = bce_loss_and_grad(w, b, phi, c)
    h = 1e-6
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        num = (bce_loss_and_grad(w + e, b, phi, c)[0] - bce_loss_and_grad(w - e, b, phi, c)[0]) / (
            2 * h
        )
        assert num == pytest.approx(gw[k], rel=1e-5, abs=1e-8)
    num_b = (bce_loss_and_grad(w, b + h, phi, c)[0] - bce_loss_and_grad(w, b - h, phi, c)[0]) / (
        2 * h
    )
    assert num_b == pytest.approx(gb, rel=1e-5, abs=1e-8)


def test_separable_data_is_learned(stream):
    gen = stream(2).generator
    x = np.concatenate([gen.uniform(-3, -0.5, 100), gen.uniform(0.5, 3, 100)])[:, None]
    c = np.r_[np.zeros(100), np.ones(100)]
    hp = LogisticTrainConfig(iterations=2000, learning_rate=1.0)
    clf, trace = train_logistic(x, c, hp, stream(3))
    acc = np.mean(decide_all(clf.score_batch(x)) == c)
    assert acc >= 0.99
    assert len(trace) == 2000


def test_zero_iterations_keep_initial_parameters(stream):
    x = np.array([[0.0], [1.0], [2.0], [3.0]])
    clf, trace = train_logistic(x, [0, 0, 1, 1], LogisticTrainConfig(iterations=0), stream(0))
    assert np.array_equal(clf.weights, [0.0]) and clf.bias == 0.0
    assert len(trace) == 0


def test_training_needs_both_classes(stream):
    with pytest.raises(DatasetError):
        train_logistic(np.ones((5, 2)), np.ones(5), LogisticTrainConfig(), stream(0))


def test_balanced_training_learns_quadratic_surface(stream):
    gen = stream(4).generator
    x = gen.standard_normal((600, 2))
    c = (np.sum(x * x, axis=1) > 1.4).astype(float)
    hp = LogisticTrainConfig(
        features="quadratic", iterations=800, learning_rate=0.5, batching="balanced"
    )
    clf, _ = train_logistic(x, c, hp, stream(5))
    assert np.mean(decide_all(clf.score_batch(x)) == c) > 0.9


def test_classifier_checkpoint_round_trip(tmp_path: Path):
    models = [LogisticClassifier([0.5, -1.0, 0.1, 0.2], 0.3, "quadratic")]
    path = save_classifiers(tmp_path / "clf.json", models, ["class"])
    back, names = load_classifiers(path)
    assert names == ["class"]
    assert back[0].dim == 2
    x = np.array([[0.4, -0.7]])
    assert np.allclose(back[0].score_batch(x), models[0].score_batch(x))


def test_balanced_batches_have_positive_negative_pairs(stream):
    labels = np.array([[1, 0], [0, 1], [0, 0], [1, 1], [0, 0], [1, 0]])
    batches = balanced_batches(
        labels, 4, major_label=0, major_ratio=0.2, stream=stream(6), n_batches=3
    )
    for batch in batches:
        assert batch.size == 8
        pos, neg = batch[0::2], batch[1::2]
        # every pair is (positive, negative) for some label
        for p, q in zip(pos, neg):
            assert np.any((labels[p] == 1) & (labels[q] == 0))


def test_balanced_batches_accept_labeled_signals(stream):
    items = [LabeledSignal(Signal([float(i)]), [i % 2]) for i in range(6)]
    batch = next(balanced_batches(items, 2, stream=stream(7)))
    assert batch.size == 4


def test_balanced_batches_require_both_classes_per_label():
    labels = np.array([[1, 1], [0, 1], [1, 1]])
    with pytest.raises(SamplingError) as exc:
        balanced_batches(labels, 2)
    assert exc.value.label == 1


def test_batches_are_reproducible(stream):
    labels = np.array([[1], [0], [1], [0], [0]])
    a = list(balanced_batches(labels, 3, stream=stream(8), n_batches=2))
    b = list(balanced_batches(labels, 3, stream=stream(8), n_batches=2))
    assert all(np.array_equal(p, q) for p, q in zip(a, b))


def test_harness_orders_results_and_scores_every_item(example_world_2d, stream):
    data = sample_joint(example_world_2d, stream(9), 30)
    results = strategy_harness(
        data.x,
        data.y,
        data.c,
        ExactPosteriorSampler(example_world_2d),
        [ExactGmmClassifier(example_world_2d, "x")],
        [ExactGmmClassifier(example_world_2d, "y")],
        K=16,
        stream=stream(10),
        reverse_sampler=ExactChannelSampler(example_world_2d),
    )
    assert [r.strategy for r in results] == list(Strategy)
    for r in results:
        assert r.scores.shape == (30,)
        assert np.array_equal(r.true_labels, data.c)
    esc = find_result(results, Strategy.ESC)
    assert len(esc.score_sets) == 30 and len(esc.score_sets[0]) == 16


def test_harness_is_independent_of_worker_count(example_world_2d, stream):
    data = sample_joint(example_world_2d, stream(11), 12)
    args = (
        data.x,
        data.y,
        data.c,
        ExactPosteriorSampler(example_world_2d),
        [ExactGmmClassifier(example_world_2d, "x")],
        [ExactGmmClassifier(example_world_2d, "y")],
        8,
    )
    one = strategy_harness(*args, stream=stream(12), workers=1)
    four = strategy_harness(*args, stream=stream(12), workers=4)
    for a, b in zip(one, four):
        assert np.array_equal(a.scores, b.scores)


def test_strategy_csv_round_trip(tmp_path: Path, example_world_2d, stream):
    data = sample_joint(example_world_2d, stream(13), 10)
    results = strategy_harness(
        data.x,
        data.y,
        data.c,
        ExactPosteriorSampler(example_world_2d),
        [ExactGmmClassifier(example_world_2d, "x")],
        [ExactGmmClassifier(example_world_2d, "y")],
        4,
        stream(14),
    )
    path = write_strategy_csv(tmp_path / "s.csv", results)
    back = read_strategy_csv(path)
    assert [r.strategy for r in back] == [r.strategy for r in results]
    for a, b in zip(results, back):
        assert np.array_equal(a.scores, b.scores)
        assert np.array_equal(a.decisions, b.decisions)


def _exact_harness(world, n_items, K, stream):
    data = sample_joint(world, stream.child(0), n_items)
    results = strategy_harness(
        data.x,
        data.y,
        data.c,
        ExactPosteriorSampler(world),
        [ExactGmmClassifier(world, "x")],
        [ExactGmmClassifier(world, "y")],
        K,
        stream.child(1),
    )
    return data, results


@pytest.mark.slow
def test_esc_with_exact_models_matches_the_y_posterior(example_world_2d, stream):
    data, results = _exact_harness(example_world_2d, 1000, 1000, stream(20))
    esc = find_result(results, Strategy.ESC).scores
    target = class_posterior_y(example_world_2d, data.y)
    # three binomial standard deviations at K = 1000
    within = np.abs(esc - target) <= 3.0 * np.sqrt(0.25 / 1000)
    assert within.mean() >= 0.99
    original_y = find_result(results, Strategy.ORIGINAL_Y).scores
    assert abs(auroc(esc, data.c) - auroc(original_y, data.c)) <= 0.01


@pytest.mark.slow
def test_esc_has_the_smallest_error_against_the_x_score(example_world_2d, stream):
    _, results = _exact_harness(example_world_2d, 10_000, 100, stream(21))
    f_x = find_result(results, Strategy.ORIGINAL_X).scores
    sq = {
        s: (find_result(results, s).scores - f_x) ** 2
        for s in (Strategy.ESC, Strategy.SSC_MEAN, Strategy.SSC_RANDOM)
    }
    mse = {s: float(v.mean()) for s, v in sq.items()}
    assert min(mse, key=mse.get) is Strategy.ESC
    gap = sq[Strategy.SSC_RANDOM] - sq[Strategy.ESC]
    assert gap.mean() > 3.0 * gap.std(ddof=1) / np.sqrt(gap.size)
