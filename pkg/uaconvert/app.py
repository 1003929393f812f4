from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .calibrate import (
    audit_guarantee,
    calibrate_lambda,
    confidence,
    exact_pipeline,
    random_pipeline,
    read_scores,
    select_reliable,
)
from .classify import (
    ExactGmmClassifier,
    Strategy,
    StrategyResult,
    decide_all,
    esc_score,
    find_result,
    read_strategy_csv,
    save_classifiers,
    strategy_harness,
    train_logistic,
    write_strategy_csv,
)
from .config import (
    COMMAND_CONFIGS,
    CalibrateConfig,
    CommandConfig,
    ConvertConfig,
    CycleConfig,
    MetricsConfig,
    PreprocessConfig,
    SamplerKind,
    SelectConfig,
    ToyworldConfig,
    TrainConfig,
    load_config,
)
from .core import RngStream, SignalDataset, read_dataset, write_dataset
from .core.dataset import dataset_from_signals
from .diffusion import (
    DdimSampler,
    load_checkpoint,
    save_checkpoint,
    train_mlp_denoiser,
)
from .diffusion.schedule import NoiseSchedule, ScheduleConfig
from .errors import CalibrationFailed, ConfigError, DatasetError
from .metrics import (
    CurvePoints,
    auroc,
    conversion_quality,
    ensemble_containment,
    esc_convergence_curve,
    histogram,
    mutual_information,
    pca_uncertainty_curve,
    risk_coverage,
    roc_curve,
    sample_frechet,
    score_interval_sizes,
    summarize_strategies,
)
from .select import best_strategy, quality_table, select_representatives, stack_selections
from .select.representative import SelectionStrategy
from .sigproc import preprocess, synth_quasiperiodic
from .toyworld import (
    ExactChannelSampler,
    ExactPosteriorSampler,
    GmmWorld,
    PosteriorSampler,
    class_posterior_y,
    mmse_estimates,
    posterior_given_y,
    posterior_sample,
    sample_joint,
)
from .utils.log import RunLog
from .utils.output import curve_csv, svg_plot, write_csv, write_json
from .utils.parallel import ordered_map
from .utils.training import LossTrace

logger = logging.getLogger(__name__)

CLASS_LABEL = ["class"]


# ---------------------------
# Run directories
# ---------------------------


def prepare_run(command: str, cfg: CommandConfig, out_dir: str | Path) -> Tuple[Path, RunLog]:
    """`<out>/<command>-<hash>` with the resolved config and a fresh run log."""
    run_dir = Path(out_dir) / f"{command}-{cfg.config_hash()}"
    run_dir.mkdir(parents=True, exist_ok=True)
    log_path = run_dir / "run.log.jsonl"
    if log_path.exists():
        log_path.unlink()
    write_json(run_dir / "config.json", cfg.hashed_dump())
    runlog = RunLog(log_path)
    runlog.write("start", command=command, config=cfg.hashed_dump())
    logger.info("%s: writing to %s", command, run_dir)
    return run_dir, runlog


def make_sampler(kind: SamplerKind, world: GmmWorld, schedule: ScheduleConfig) -> PosteriorSampler:
    if kind == "exact":
        return ExactPosteriorSampler(world)
    return DdimSampler.analytic(world, schedule.build())


def write_trace(path: Path, trace: LossTrace, step_name: str = "epoch") -> Path:
    return write_csv(path, [step_name, "train_loss", "val_loss"], trace.rows())


def export_strategies(
    run_dir: Path, tag: str, results: Sequence[StrategyResult], plots: bool
) -> None:
    """Strategy scores plus long-format ROC and risk-coverage CSVs (and SVGs)."""
    write_strategy_csv(run_dir / f"strategies_{tag}.csv", results)
    roc_rows, rc_rows = [], []
    roc_series: Dict[int, dict] = {}
    rc_series: Dict[int, dict] = {}
    for r in results:
        rc = risk_coverage(r.decisions, r.true_labels, r.confidences)
        rc_rows.extend((r.strategy.value, r.label_index, c, k) for c, k in zip(rc.xs, rc.ys))
        rc_series.setdefault(r.label_index, {})[r.strategy.value] = rc
        if r.true_labels.all() or not r.true_labels.any():
            continue
        roc = roc_curve(r.scores, r.true_labels)
        roc_rows.extend((r.strategy.value, r.label_index, x, y) for x, y in zip(roc.xs, roc.ys))
        roc_series.setdefault(r.label_index, {})[r.strategy.value] = roc
    write_csv(run_dir / f"roc_{tag}.csv", ["strategy", "label_index", "fpr", "tpr"], roc_rows)
    write_csv(run_dir / f"rc_{tag}.csv", ["strategy", "label_index", "coverage", "risk"], rc_rows)
    if not plots:
        return
    for label, series in roc_series.items():
        svg_plot(run_dir / f"roc_{tag}_label{label}.svg", series, f"ROC ({tag})", "FPR", "TPR")
    for label, series in rc_series.items():
        svg_plot(
            run_dir / f"rc_{tag}_label{label}.svg",
            series,
            f"Risk-coverage ({tag})",
            "coverage",
            "selective risk",
        )


# ---------------------------
# toyworld
# ---------------------------


def optimality_check(
    results: Sequence[StrategyResult], world: GmmWorld, ys: np.ndarray, K: int
) -> dict:
    """ESC vs the exact pi(C=1|Y): per-item deviation within a 3-sigma band, AUROC gap."""
    esc = find_result(results, Strategy.ESC)
    orig_y = find_result(results, Strategy.ORIGINAL_Y)
    band = 3.0 * np.sqrt(0.25 / K)
    deviation = np.abs(esc.scores - class_posterior_y(world, ys))
    out = {"band": band, "within_band": float(np.mean(deviation <= band))}
    if esc.true_labels.any() and not esc.true_labels.all():
        a_esc = auroc(esc.scores, esc.true_labels)
        a_y = auroc(orig_y.scores, orig_y.true_labels)
        out.update(auroc_esc=a_esc, auroc_original_y=a_y, auroc_gap=abs(a_esc - a_y))
    return out


def run_toyworld(cfg: ToyworldConfig, out_dir: str | Path) -> Path:
    run_dir, runlog = prepare_run("toyworld", cfg, out_dir)
    world = cfg.world.build()
    world.require_both_classes()
    root = RngStream(cfg.seed)

    data = sample_joint(world, root.child(0), cfg.n_items)
    write_dataset(run_dir / "dataset_x.csv", SignalDataset(data.x, data.c, label_names=CLASS_LABEL))
    write_dataset(run_dir / "dataset_y.csv", SignalDataset(data.y, data.c, label_names=CLASS_LABEL))
    reverse = ExactChannelSampler(world) if cfg.synth_y else None

    results = strategy_harness(
        data.x,
        data.y,
        data.c,
        make_sampler(cfg.sampler, world, cfg.schedule),
        [ExactGmmClassifier(world, "x")],
        [ExactGmmClassifier(world, "y")],
        cfg.K,
        root.child(1),
        reverse_sampler=reverse,
        decision_threshold=cfg.decision_threshold,
        workers=cfg.workers,
    )
    export_strategies(run_dir, "exact", results, cfg.plots)
    summary = {
        "exact": summarize_strategies(results, CLASS_LABEL),
        "exact_optimality": optimality_check(results, world, data.y, cfg.K),
    }
    runlog.write("harness", pipeline="exact", n_items=cfg.n_items, K=cfg.K)

    t = cfg.trained
    if t.enabled:
        train = sample_joint(world, root.child(2), t.n_train)
        schedule = t.schedule.build()
        model, trace = train_mlp_denoiser(train.x, train.y, schedule, t.denoiser, root.child(3))
        write_trace(run_dir / "denoiser_loss.csv", trace)
        f_x, _ = train_logistic(train.x, train.c, t.classifier, root.child(4))
        f_y, _ = train_logistic(train.y, train.c, t.classifier, root.child(5))
        items = data.head(t.n_items)
        trained = strategy_harness(
            items.x,
            items.y,
            items.c,
            DdimSampler.trained(model, schedule, world.dim),
            [f_x],
            [f_y],
            t.K,
            root.child(6),
            reverse_sampler=reverse,
            decision_threshold=cfg.decision_threshold,
            workers=cfg.workers,
        )
        export_strategies(run_dir, "trained", trained, cfg.plots)
        summary["trained"] = summarize_strategies(trained, CLASS_LABEL)
        runlog.write("harness", pipeline="trained", n_items=len(items), K=t.K)

    write_json(run_dir / "summary.json", summary)
    runlog.write("done")
    return run_dir


# ---------------------------
# convert
# ---------------------------


def _schedule_for(stride: Optional[int], base: NoiseSchedule) -> NoiseSchedule:
    return base.with_stride(stride) if stride else base


def build_converter(cfg: ConvertConfig, world: Optional[GmmWorld], y_dim: int) -> PosteriorSampler:
    spec = cfg.denoiser
    if spec.kind == "exact":
        return ExactPosteriorSampler(world)
    if spec.kind == "analytic":
        return DdimSampler.analytic(world, _schedule_for(spec.ddim_stride, NoiseSchedule()))
    model, schedule = load_checkpoint(spec.checkpoint)
    if model.y_dim != y_dim:
        raise ConfigError(
            f"checkpoint expects observations of length {model.y_dim}, got {y_dim}",
            path="denoiser.checkpoint",
        )
    return DdimSampler.trained(model, _schedule_for(spec.ddim_stride, schedule), model.x_dim)


def run_convert(cfg: ConvertConfig, out_dir: str | Path) -> Path:
    run_dir, runlog = prepare_run("convert", cfg, out_dir)
    world = cfg.world.build() if cfg.world else None
    root = RngStream(cfg.seed)

    truths = None
    if cfg.dataset:
        obs = read_dataset(cfg.dataset)
        ys, rate = obs.values, obs.sample_rate_hz
    else:
        data = sample_joint(world, root.child(0), cfg.n_items)
        ys, rate, truths = data.y, 1.0, data.x
        write_dataset(run_dir / "observations.csv", SignalDataset(ys, data.c))
        write_dataset(run_dir / "truths.csv", SignalDataset(truths, data.c))
    if cfg.truths:
        truths = read_dataset(cfg.truths).values
        if truths.shape[0] != ys.shape[0]:
            raise DatasetError(f"{truths.shape[0]} ground truths for {ys.shape[0]} observations")
    if world is not None and ys.shape[1] != world.dim:
        raise DatasetError(f"observations have length {ys.shape[1]}, world dim is {world.dim}")

    sampler = build_converter(cfg, world, ys.shape[1])
    sampler.sample_rate_hz = rate
    ensembles = ordered_map(
        lambda i: sampler.sample(ys[i], root.child(1, i), cfg.K), range(ys.shape[0]), cfg.workers
    )
    for i, ens in enumerate(ensembles):
        write_dataset(
            run_dir / "ensembles" / f"ensemble_{i:05d}.csv",
            SignalDataset(ens.samples, sample_rate_hz=rate),
        )
    runlog.write("converted", n_items=len(ensembles), K=cfg.K, denoiser=cfg.denoiser.kind)

    report: dict = {"n_items": len(ensembles), "K": cfg.K, "denoiser": cfg.denoiser.kind}
    if truths is not None and cfg.K >= 1 and len(ensembles) >= 2:
        report["quality"] = conversion_quality(ensembles, truths).to_dict()
    if world is not None and cfg.denoiser.kind != "exact" and cfg.K >= 2:
        fds = [
            sample_frechet(
                ens.samples,
                posterior_sample(posterior_given_y(world, ys[i]), root.child(2, i), cfg.K),
            )
            for i, ens in enumerate(ensembles)
        ]
        report["fd_vs_oracle"] = float(np.mean(fds))
    write_json(run_dir / "report.json", report)
    runlog.write("done")
    return run_dir


# ---------------------------
# train
# ---------------------------


def _training_data(cfg: TrainConfig, root: RngStream):
    if cfg.world is not None:
        world = cfg.world.build()
        data = sample_joint(world, root.child(0), cfg.n_train)
        return data.x, data.y, data.c[:, None], CLASS_LABEL
    dx = read_dataset(cfg.dataset_x)
    dy = read_dataset(cfg.dataset_y)
    if dx.n_signals != dy.n_signals:
        raise DatasetError(f"{dx.n_signals} x signals paired with {dy.n_signals} y signals")
    return dx.values, dy.values, dx.labels, list(dx.label_names)


def run_train(cfg: TrainConfig, out_dir: str | Path) -> Path:
    run_dir, runlog = prepare_run("train", cfg, out_dir)
    root = RngStream(cfg.seed)
    xs, ys, labels, names = _training_data(cfg, root)

    if cfg.denoiser is not None:
        schedule = cfg.schedule.build()
        model, trace = train_mlp_denoiser(xs, ys, schedule, cfg.denoiser, root.child(1))
        save_checkpoint(run_dir / "denoiser.json", model, schedule)
        write_trace(run_dir / "denoiser_loss.csv", trace)
        runlog.write("denoiser", epochs=len(trace), final_train=trace.train[-1] if trace else None)

    for side, hyper, inputs, index in (
        ("x", cfg.classifier_x, xs, 2),
        ("y", cfg.classifier_y, ys, 3),
    ):
        if hyper is None:
            continue
        if labels is None:
            raise DatasetError("classifier training needs labelled signals")
        models, rows = [], []
        for j in range(labels.shape[1]):
            clf, trace = train_logistic(inputs, labels[:, j], hyper, root.child(index, j))
            models.append(clf)
            rows.extend((step, j, tr, va) for step, tr, va in trace.rows())
        save_classifiers(run_dir / f"classifier_{side}.json", models, names)
        write_csv(
            run_dir / f"classifier_{side}_loss.csv",
            ["iteration", "label_index", "train_loss", "val_loss"],
            rows,
        )
        runlog.write("classifier", side=side, n_labels=len(models))
    runlog.write("done")
    return run_dir


# ---------------------------
# calibrate
# ---------------------------


def run_calibrate(cfg: CalibrateConfig, out_dir: str | Path) -> Path:
    """Writes the report even when calibration fails, then raises CalibrationFailed."""
    run_dir, runlog = prepare_run("calibrate", cfg, out_dir)
    root = RngStream(cfg.seed)
    world = cfg.world.build() if cfg.world else None

    if cfg.scores:
        scores, labels = read_scores(cfg.scores, cfg.strategy, cfg.label_index)
    else:
        cal = sample_joint(world, root.child(0), cfg.n_calibration)
        scores, labels = exact_pipeline(world)(cal, root.child(1)), cal.c
    outcome = calibrate_lambda(scores, labels, cfg.calibration)
    write_json(run_dir / "calibration.json", outcome.to_report())
    runlog.write("calibrated", lambda_hat=outcome.lambda_hat, coverage=outcome.coverage)
    if cfg.plots:
        pts = [p for p in outcome.trace if p.bound is not None and p.risk is not None]
        if pts:
            xs = [p.lambda_ for p in pts]
            svg_plot(
                run_dir / "calibration.svg",
                {
                    "risk": CurvePoints(xs, [p.risk for p in pts]),
                    "upper bound": CurvePoints(xs, [p.bound for p in pts]),
                    "alpha": CurvePoints(xs, [cfg.calibration.alpha] * len(xs)),
                },
                "Selective risk bound",
                "lambda",
                "risk",
            )

    if cfg.deploy_scores:
        d_scores, d_labels = read_scores(cfg.deploy_scores, cfg.strategy, cfg.label_index)
        conf = confidence(d_scores)
        accepted = select_reliable(conf, outcome)
        decisions = decide_all(d_scores, cfg.calibration.decision_threshold)
        write_csv(
            run_dir / "deployment.csv",
            ["item_index", "score", "decision", "confidence", "accepted", "true_label"],
            zip(range(d_scores.size), d_scores, decisions, conf, accepted, d_labels),
        )
        n_acc = int(accepted.sum())
        risk = float(np.mean(decisions[accepted] != d_labels[accepted])) if n_acc else None
        write_json(
            run_dir / "deployment.json",
            {"n_items": int(d_scores.size), "accepted": n_acc, "selective_risk": risk},
        )

    if cfg.audit is not None:
        a = cfg.audit
        pipeline = exact_pipeline(world) if a.pipeline == "exact" else random_pipeline()
        result = audit_guarantee(
            world, pipeline, cfg.calibration, a.n_trials, root.child(2), a.m, a.n_test, cfg.workers
        )
        write_json(
            run_dir / "audit.json",
            {
                "pipeline": a.pipeline,
                "n_trials": result.n_trials,
                "n_failed": result.n_failed,
                "n_valid": result.n_valid,
                "validity_rate": result.validity_rate,
                "target": 1.0 - cfg.calibration.delta,
            },
        )
        runlog.write("audit", validity_rate=result.validity_rate, n_failed=result.n_failed)

    runlog.write("done", failed=outcome.failed)
    if outcome.failed:
        raise CalibrationFailed(
            f"no lambda certifies alpha={cfg.calibration.alpha} (report in {run_dir})"
        )
    return run_dir


# ---------------------------
# metrics
# ---------------------------


def run_metrics(cfg: MetricsConfig, out_dir: str | Path) -> Path:
    run_dir, runlog = prepare_run("metrics", cfg, out_dir)
    root = RngStream(cfg.seed)
    summary: dict = {}

    if cfg.strategies:
        results = read_strategy_csv(cfg.strategies)
        export_strategies(run_dir, "input", results, cfg.plots)
        summary["strategies"] = summarize_strategies(results, cfg.label_names)
        runlog.write("strategies", n_results=len(results))

    if cfg.world is not None:
        summary["uncertainty"] = _uncertainty_report(cfg, run_dir, root)
        runlog.write("uncertainty")

    write_json(run_dir / "summary.json", summary)
    runlog.write("done")
    return run_dir


def _uncertainty_report(cfg: MetricsConfig, run_dir: Path, root: RngStream) -> dict:
    u = cfg.uncertainty
    world = cfg.world.build()
    sampler = ExactPosteriorSampler(world)
    f_x = ExactGmmClassifier(world, "x")
    items = sample_joint(world, root.child(0), u.n_items)
    ensembles = ordered_map(
        lambda i: sampler.sample(items.y[i], root.child(1, i), u.K), range(len(items)), cfg.workers
    )
    score_sets = [esc_score(e, f_x)[1] for e in ensembles]

    pca = pca_uncertainty_curve(ensembles, items.x, u.pc_counts, u.coord_quantile)
    curve_csv(run_dir / "pca_curve.csv", pca, "n_components", "error")

    sizes = score_interval_sizes(score_sets, u.interval_mass)
    write_csv(run_dir / "interval_sizes.csv", ["item_index", "interval_size"], enumerate(sizes))
    edges, counts = histogram(sizes, u.histogram_bins)
    write_csv(
        run_dir / "interval_hist.csv",
        ["bin_low", "bin_high", "count"],
        zip(edges[:-1], edges[1:], counts),
    )

    containment = ensemble_containment(ensembles, items.x, u.containment_quantile)
    conv = esc_convergence_curve(
        sampler, f_x, items, u.K_grid, u.repeats, root.child(2), workers=cfg.workers
    )
    write_csv(
        run_dir / "convergence.csv",
        ["K", "accuracy_gap", "score_std"],
        zip(conv.gap.xs.astype(int), conv.gap.ys, conv.score_std.ys),
    )

    big = sample_joint(world, root.child(3), u.mi_samples)
    mi_y = mutual_information(big.y, big.c, u.mi_bins)
    mi_mmse = mutual_information(mmse_estimates(world, big.y), big.c, u.mi_bins)
    mi_x = mutual_information(big.x, big.c, u.mi_bins)

    if cfg.plots:
        svg_plot(run_dir / "pca_curve.svg", {"error": pca}, "PCA uncertainty", "PCs", "error")
        svg_plot(
            run_dir / "convergence.svg",
            {"accuracy gap": conv.gap, "score std": conv.score_std},
            "ESC convergence",
            "K",
            "value",
        )
    return {
        "pca_curve": dict(zip(map(str, pca.xs.astype(int)), pca.ys)),
        "interval_size_mean": float(np.mean(sizes)),
        "containment": containment.fraction,
        "mutual_information": {
            "y_c": mi_y,
            "mmse_c": mi_mmse,
            "x_c": mi_x,
            "data_processing_holds": bool(mi_y >= mi_mmse - 0.01),
        },
    }


# ---------------------------
# select
# ---------------------------


def run_select(cfg: SelectConfig, out_dir: str | Path) -> Path:
    run_dir, runlog = prepare_run("select", cfg, out_dir)
    world = cfg.world.build()
    root = RngStream(cfg.seed)
    sampler = make_sampler(cfg.sampler, world, cfg.schedule)
    f_x = ExactGmmClassifier(world, "x")
    items = sample_joint(world, root.child(0), cfg.n_items)

    def run(i: int):
        ens = sampler.sample(items.y[i], root.child(1, i), cfg.K)
        return select_representatives(ens, f_x, cfg.decision_threshold, cfg.bins)

    outputs = ordered_map(run, range(len(items)), cfg.workers)
    picks = [p for p, _ in outputs]
    per_item: List[dict] = [
        {
            "item_index": i,
            "fallback": filtered.fallback,
            "selections": [p[s].to_dict() for s in SelectionStrategy],
        }
        for i, (p, filtered) in enumerate(outputs)
    ]
    write_json(run_dir / "selections.json", per_item)
    for strategy in SelectionStrategy:
        chosen = stack_selections([p[strategy] for p in picks])
        write_dataset(run_dir / f"selected_{strategy.value}.csv", SignalDataset(chosen))
    table = quality_table(picks, items.x)
    write_json(
        run_dir / "quality.json",
        {"table": table, "best_by_rmse": best_strategy(table, "rmse"), "n_items": len(items)},
    )
    n_fallback = sum(1 for item in per_item if item["fallback"])
    runlog.write("selected", n_items=len(items), fallbacks=n_fallback)
    runlog.write("done")
    return run_dir


# ---------------------------
# preprocess
# ---------------------------


def run_preprocess(cfg: PreprocessConfig, out_dir: str | Path) -> Path:
    run_dir, runlog = prepare_run("preprocess", cfg, out_dir)
    root = RngStream(cfg.seed)
    labels = None
    if cfg.input:
        ds = read_dataset(cfg.input)
        signals = [ds.signal(i) for i in range(ds.n_signals)]
        labels = ds.labels
    else:
        s = cfg.synth
        signals = [
            synth_quasiperiodic(
                s.kind, s.rate_hz, s.duration_s, s.beat_hz, s.jitter, root.child(i), noise=s.noise
            )
            for i in range(s.n_signals)
        ]
        write_dataset(run_dir / "raw.csv", dataset_from_signals(signals))
    processed = ordered_map(lambda sig: preprocess(sig, cfg.steps), signals, cfg.workers)
    write_dataset(run_dir / "preprocessed.csv", dataset_from_signals(processed, labels))
    runlog.write("preprocessed", n_signals=len(processed), d=processed[0].d)
    runlog.write("done")
    return run_dir


# ---------------------------
# cycle
# ---------------------------


def run_cycle(cfg: CycleConfig, out_dir: str | Path) -> Path:
    """X -> Y -> X: convert a reverse-direction draw back and compare with direct conversion."""
    run_dir, runlog = prepare_run("cycle", cfg, out_dir)
    world = cfg.world.build()
    root = RngStream(cfg.seed)
    sampler = make_sampler(cfg.sampler, world, cfg.schedule)
    reverse = ExactChannelSampler(world)
    items = sample_joint(world, root.child(0), cfg.n_items)

    def run(i: int):
        direct = sampler.sample(items.y[i], root.child(1, i), cfg.K)
        y_hat = reverse.sample(items.x[i], root.child(2, i), 1).samples[0]
        cycled = sampler.sample(y_hat, root.child(3, i), cfg.K)
        return direct, cycled

    pairs = ordered_map(run, range(len(items)), cfg.workers)
    direct = conversion_quality([p[0] for p in pairs], items.x)
    cycled = conversion_quality([p[1] for p in pairs], items.x)
    between = sample_frechet(
        np.concatenate([p[1].samples for p in pairs]),
        np.concatenate([p[0].samples for p in pairs]),
    )
    write_csv(
        run_dir / "cycle.csv",
        ["route", "rmse", "fd_1", "fd_K"],
        [
            ("direct", direct.rmse, direct.fd_single, direct.fd_ensemble),
            ("cycle", cycled.rmse, cycled.fd_single, cycled.fd_ensemble),
        ],
    )
    write_json(
        run_dir / "report.json",
        {"direct": direct.to_dict(), "cycle": cycled.to_dict(), "fd_cycle_vs_direct": between},
    )
    runlog.write("cycle", fd_cycle_vs_direct=between)
    runlog.write("done")
    return run_dir


RUNNERS = {
    "toyworld": run_toyworld,
    "convert": run_convert,
    "train": run_train,
    "calibrate": run_calibrate,
    "metrics": run_metrics,
    "select": run_select,
    "preprocess": run_preprocess,
    "cycle": run_cycle,
}


def run_command(
    command: str,
    config_path: Optional[str | Path],
    out_dir: str | Path,
    overrides: Optional[Dict[str, object]] = None,
) -> Path:
    """Load `config_path` into the command's config model and dispatch to its runner."""
    cfg = load_config(config_path, COMMAND_CONFIGS[command], overrides)
    return RUNNERS[command](cfg, out_dir)
