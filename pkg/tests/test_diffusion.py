from pathlib import Path

import numpy as np
import pytest

from uaconvert.diffusion import (
    AnalyticGmmDenoiser,
    DdimSampler,
    DenoiserModel,
    DenoiserTrainConfig,
    MlpDenoiser,
    NoiseSchedule,
    ScheduleConfig,
    analytic_gmm_denoiser,
    ddim_sample,
    ddim_step,
    diffuse,
    forward_noising,
    load_checkpoint,
    predict_x0,
    save_checkpoint,
    timestep_embedding,
    train_mlp_denoiser,
)
from uaconvert.errors import ConfigError, NumericalError, TrainingError
from uaconvert.metrics import GaussianSummary, fit_gaussian, frechet_distance, sample_frechet
from uaconvert.toyworld import PosteriorGmm, posterior_given_y, posterior_sample, sample_joint


def test_schedule_shape_and_ends():
    sched = ScheduleConfig().build()
    steps = sched.timesteps()
    assert steps[0] == 999 and steps[-1] == 9 and steps.size == 100
    assert sched.alpha_bar(-1) == 1.0
    assert 0.0 < sched.alpha_bar(999) < 0.01
    assert np.all(np.diff(sched.alphas_bar) < 0)


def test_schedule_rejects_bad_stride():
    with pytest.raises(ValueError):
        NoiseSchedule(1000, 1e-6, 1e-2, 7)


def test_unit_alpha_bar_is_identity():
    x0 = np.array([0.3, -1.2])
    assert np.array_equal(diffuse(x0, np.array([5.0, 5.0]), 1.0), x0)


def test_forward_noising_is_reproducible(stream):
    sched = NoiseSchedule()
    a, eps_a = forward_noising(np.ones(3), 500, stream(1), sched)
    b, eps_b = forward_noising(np.ones(3), 500, stream(1), sched)
    assert np.array_equal(a, b) and np.array_equal(eps_a, eps_b)
    ab = sched.alpha_bar(500)
    assert np.allclose(a, np.sqrt(ab) + np.sqrt(1 - ab) * eps_a)


def test_ddim_step_noiseless_algebra():
    sched = NoiseSchedule()
    x0 = np.array([1.5, -0.5])
    x_t = np.sqrt(sched.alpha_bar(500)) * x0
    out = ddim_step(x_t, np.zeros(2), 500, 490, sched)
    assert np.allclose(out, np.sqrt(sched.alpha_bar(490)) * x0, atol=1e-12)


def test_x0_recovery_is_exact():
    x0 = np.array([0.7, -2.0, 3.1])
    eps = np.array([0.1, 0.5, -1.0])
    ab = 0.37
    assert np.allclose(predict_x0(diffuse(x0, eps, ab), eps, ab), x0, atol=1e-12)


def test_ddim_sample_is_deterministic(symmetric_world_1d, stream):
    sched = NoiseSchedule()
    den = analytic_gmm_denoiser(symmetric_world_1d, np.array([0.4]), sched)
    a = ddim_sample(den, np.array([0.4]), stream(3), sched, 1)
    b = ddim_sample(den, np.array([0.4]), stream(3), sched, 1)
    assert np.array_equal(a.samples, b.samples)


def test_chains_do_not_depend_on_k(symmetric_world_1d, stream):
    sched = NoiseSchedule(ddim_stride=50)
    den = analytic_gmm_denoiser(symmetric_world_1d, np.array([0.4]), sched)
    few = ddim_sample(den, np.array([0.4]), stream(3), sched, 3)
    many = ddim_sample(den, np.array([0.4]), stream(3), sched, 8)
    assert np.allclose(few.samples, many.samples[:3])


def test_non_finite_denoiser_aborts_with_step(stream):
    class Broken(DenoiserModel):
        def predict(self, x_t, y, step_index):
            return np.full_like(x_t, np.nan)

    with pytest.raises(NumericalError) as exc:
        ddim_sample(Broken(), np.zeros(2), stream(0), NoiseSchedule(), 2)
    assert exc.value.step == 999


def test_gaussian_prior_noise_prediction():
    den = AnalyticGmmDenoiser(PosteriorGmm([1.0], [[0.0]], [[[1.0]]]), NoiseSchedule())
    x = np.array([[0.8], [-1.3]])
    assert np.allclose(den.eps_at(x, 0.5), np.sqrt(0.5) * x)


def test_noise_prediction_vanishes_at_symmetric_points():
    post = PosteriorGmm([0.5, 0.5], [[-1.0], [1.0]], [[[0.3]], [[0.3]]])
    den = AnalyticGmmDenoiser(post, NoiseSchedule())
    assert abs(den.eps_at(np.array([0.0]), 0.4)[0]) < 1e-12
    single = AnalyticGmmDenoiser(PosteriorGmm([1.0], [[2.0]], [[[0.5]]]), NoiseSchedule())
    ab = 0.999999
    assert abs(single.eps_at(np.array([np.sqrt(ab) * 2.0]), ab)[0]) < 1e-9


@pytest.mark.slow
def test_symmetric_world_ddim_mean(symmetric_world_1d, stream):
    sched = NoiseSchedule()
    den = analytic_gmm_denoiser(symmetric_world_1d, np.array([0.0]), sched)
    ens = ddim_sample(den, np.array([0.0]), stream(5), sched, 10_000)
    assert abs(ens.samples.mean()) < 0.05


@pytest.mark.slow
def test_analytic_ddim_matches_exact_posterior(example_world_2d, stream):
    y = sample_joint(example_world_2d, stream(6), 1).y[0]
    sampler = DdimSampler.analytic(example_world_2d, NoiseSchedule())
    ddim = sampler.sample(y, stream(7), 5000).samples
    exact = posterior_sample(posterior_given_y(example_world_2d, y), stream(8), 5000)
    assert sample_frechet(ddim, exact) < 0.05


def _posterior_moments(post: PosteriorGmm) -> GaussianSummary:
    w, mu, cov = post.weights_given_y, post.means_given_y, post.covs_given_y
    mean = w @ mu
    second = np.einsum("k,kij->ij", w, cov + np.einsum("ki,kj->kij", mu, mu))
    return GaussianSummary(mean, second - np.outer(mean, mean))


@pytest.mark.slow
def test_more_ddim_steps_move_ensembles_toward_the_posterior(example_world_2d, stream):
    # every stride starts its chains from the same noise, so fit differences
    # come from the discretization alone
    ys = sample_joint(example_world_2d, stream(20), 4).y
    base = NoiseSchedule()
    coarse, fine = [], []
    for i, y in enumerate(ys):
        den = analytic_gmm_denoiser(example_world_2d, y, base)
        runs = {
            stride: fit_gaussian(
                ddim_sample(den, y, stream(21, i), base.with_stride(stride), 2000).samples
            )
            for stride in (40, 10, 1)
        }
        exact = _posterior_moments(posterior_given_y(example_world_2d, y))
        assert frechet_distance(runs[1], exact) < 0.05
        coarse.append(frechet_distance(runs[40], runs[1]))
        fine.append(frechet_distance(runs[10], runs[1]))
    assert np.mean(fine) <= np.mean(coarse)


def test_timestep_embedding_is_bounded():
    emb = timestep_embedding(np.array([0, 10, 999]), 16)
    assert emb.shape == (3, 16)
    assert np.all(np.abs(emb) <= 1.0)


def test_mlp_gradients_match_finite_differences(stream):
    model = MlpDenoiser.initialize(2, 2, hidden=(5,), t_emb=4, stream=stream(9))
    gen = stream(10).generator
    inp = model.features(gen.standard_normal((6, 2)), gen.standard_normal((6, 2)), np.arange(6))
    target = gen.standard_normal((6, 2))
    _, grads = model.loss_and_grads(inp, target)

    params = [p.copy() for p in model.parameters]
    h = 1e-6
    for pi, idx in [(0, (0, 0)), (0, (3, 2)), (1, (1,)), (2, (4, 1)), (3, (0,))]:
        up = [p.copy() for p in params]
        down = [p.copy() for p in params]
        up[pi][idx] += h
        down[pi][idx] -= h
        numeric = (
            model.with_parameters(up).loss_and_grads(inp, target)[0]
            - model.with_parameters(down).loss_and_grads(inp, target)[0]
        ) / (2 * h)
        analytic = grads[pi][idx]
        assert numeric == pytest.approx(analytic, rel=1e-4, abs=1e-7)


def test_zero_epochs_returns_initialization(symmetric_world_1d, stream):
    data = sample_joint(symmetric_world_1d, stream(11), 40)
    hp = DenoiserTrainConfig(hidden=[8], epochs=0)
    model, trace = train_mlp_denoiser(data.x, data.y, NoiseSchedule(), hp, stream(12))
    init = MlpDenoiser.initialize(1, 1, [8], hp.t_emb, stream(12).child(0))
    assert len(trace) == 0
    for a, b in zip(model.parameters, init.parameters):
        assert np.array_equal(a, b)


def test_training_reduces_loss_and_traces_every_epoch(symmetric_world_1d, stream):
    data = sample_joint(symmetric_world_1d, stream(13), 400)
    hp = DenoiserTrainConfig(hidden=[32, 32], epochs=8, batch_size=64, learning_rate=1e-2)
    model, trace = train_mlp_denoiser(data.x, data.y, NoiseSchedule(), hp, stream(14))
    rows = trace.rows()
    assert [r[0] for r in rows] == list(range(1, 9))
    assert all(np.isfinite(r[2]) for r in rows)
    assert rows[-1][1] < rows[0][1]


def test_empty_training_set_is_a_training_error(stream):
    hp = DenoiserTrainConfig(hidden=[4], epochs=1)
    with pytest.raises(TrainingError, match="empty"):
        train_mlp_denoiser(np.empty((0, 2)), np.empty((0, 2)), NoiseSchedule(), hp, stream(16))


@pytest.mark.slow
def test_trained_denoiser_approaches_the_exact_posterior(world_d8, stream):
    data = sample_joint(world_d8, stream(17), 20_000)
    hp = DenoiserTrainConfig(hidden=[128, 128], epochs=60, batch_size=128)
    model, _ = train_mlp_denoiser(data.x, data.y, NoiseSchedule(), hp, stream(18))
    sampler = DdimSampler.trained(model, NoiseSchedule(), world_d8.dim)
    fds = []
    for i, y in enumerate(sample_joint(world_d8, stream(19), 5).y):
        ens = sampler.sample(y, stream(22, i), 2000)
        exact = _posterior_moments(posterior_given_y(world_d8, y))
        fds.append(frechet_distance(fit_gaussian(ens.samples), exact))
    assert np.mean(fds) < 0.3


def test_checkpoint_round_trip(tmp_path: Path, stream):
    model = MlpDenoiser.initialize(2, 3, hidden=(4,), t_emb=6, stream=stream(15))
    sched = NoiseSchedule(ddim_stride=20)
    path = save_checkpoint(tmp_path / "den.json", model, sched)
    back, back_sched = load_checkpoint(path)
    assert (back.x_dim, back.y_dim, back.t_emb) == (2, 3, 6)
    assert back_sched.ddim_stride == 20
    x = np.ones((2, 2))
    assert np.allclose(back.predict(x, np.zeros(3), 100), model.predict(x, np.zeros(3), 100))


def test_checkpoint_shape_mismatch(tmp_path: Path, stream):
    model = MlpDenoiser.initialize(2, 3, hidden=(4,), t_emb=6, stream=stream(15))
    path = save_checkpoint(tmp_path / "den.json", model, NoiseSchedule())
    text = path.read_text(encoding="utf-8").replace('"y_dim": 3', '"y_dim": 4')
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_checkpoint(path)
