import json
from pathlib import Path

import pytest
import yaml

from cli import EXIT_CALIBRATION, EXIT_CONFIG, EXIT_OK, main
from uaconvert.toyworld import make_world, save_world

SMALL = {
    "toyworld": {"n_items": 40, "K": 8},
    "convert": {
        "world": {},
        "n_items": 4,
        "K": 6,
        "denoiser": {"kind": "analytic", "ddim_stride": 100},
    },
    "train": {
        "world": {},
        "n_train": 200,
        "denoiser": {"hidden": [8], "epochs": 1, "batch_size": 64},
        "classifier_x": {"iterations": 10},
        "classifier_y": {"iterations": 10},
    },
    "metrics": {
        "world": {},
        "uncertainty": {
            "n_items": 6,
            "K": 8,
            "pc_counts": [0, 1],
            "K_grid": [1, 4],
            "repeats": 2,
            "mi_samples": 2000,
        },
    },
    "select": {"n_items": 6, "K": 8},
    "preprocess": {"synth": {"n_signals": 2, "duration_s": 4.0}},
    "cycle": {"n_items": 6, "K": 5},
}


def _config(tmp_path: Path, name: str, doc: dict) -> str:
    path = tmp_path / f"{name}.yaml"
    path.write_text(yaml.safe_dump(doc), encoding="utf-8")
    return str(path)


def _run(tmp_path: Path, command: str, doc: dict, out: str = "runs", *extra: str) -> tuple:
    cfg = _config(tmp_path, command, doc)
    out_dir = tmp_path / out
    code = main(["-q", command, "--config", cfg, "--out", str(out_dir), *extra])
    runs = sorted(out_dir.glob(f"{command}-*")) if out_dir.exists() else []
    return code, runs


@pytest.mark.parametrize("command", sorted(SMALL))
def test_command_writes_a_run_directory(tmp_path: Path, command):
    code, runs = _run(tmp_path, command, SMALL[command])
    assert code == EXIT_OK
    assert len(runs) == 1
    run_dir = runs[0]
    assert (run_dir / "config.json").exists()
    events = [
        json.loads(line)["event"]
        for line in (run_dir / "run.log.jsonl").read_text(encoding="utf-8").splitlines()
    ]
    assert events[0] == "start" and events[-1] == "done"


def test_toyworld_outputs(tmp_path: Path):
    _, runs = _run(tmp_path, "toyworld", SMALL["toyworld"])
    run_dir = runs[0]
    for name in ("strategies_exact.csv", "roc_exact.csv", "rc_exact.csv", "summary.json"):
        assert (run_dir / name).exists()
    summary = json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))
    assert "ESC" in json.dumps(summary["exact"])
    assert "within_band" in summary["exact_optimality"]


def test_outputs_do_not_depend_on_worker_count(tmp_path: Path):
    _, one = _run(tmp_path, "toyworld", SMALL["toyworld"], "w1", "--workers", "1")
    _, two = _run(tmp_path, "toyworld", SMALL["toyworld"], "w2", "--workers", "2")
    assert one[0].name == two[0].name
    files = sorted(p.relative_to(one[0]) for p in one[0].rglob("*") if p.is_file())
    assert files
    for rel in files:
        assert (one[0] / rel).read_bytes() == (two[0] / rel).read_bytes(), rel


def test_seed_override_changes_the_run(tmp_path: Path):
    _, a = _run(tmp_path, "select", SMALL["select"], "s", "--seed", "1")
    _, b = _run(tmp_path, "select", SMALL["select"], "s", "--seed", "2")
    assert len(b) == 2 and a[0] in b


def test_world_file_is_used(tmp_path: Path):
    world_path = save_world(tmp_path / "world.json", make_world(dim=3))
    code, runs = _run(
        tmp_path, "cycle", {"world": {"path": str(world_path)}, "n_items": 4, "K": 4}
    )
    assert code == EXIT_OK
    report = json.loads((runs[0] / "report.json").read_text(encoding="utf-8"))
    assert report["direct"]["n_items"] == 4


def test_missing_world_file_is_a_config_error(tmp_path: Path):
    code, _ = _run(tmp_path, "select", {"world": {"path": str(tmp_path / "nope.json")}})
    assert code == EXIT_CONFIG


def test_invalid_config_is_a_config_error(tmp_path: Path):
    code, runs = _run(tmp_path, "toyworld", {"K": 0})
    assert code == EXIT_CONFIG
    assert runs == []


def test_uncertifiable_calibration_exits_with_report(tmp_path: Path):
    code, runs = _run(tmp_path, "calibrate", {"world": {}, "n_calibration": 50})
    assert code == EXIT_CALIBRATION
    report = json.loads((runs[0] / "calibration.json").read_text(encoding="utf-8"))
    assert report["lambda_hat"] == "FAILED"


def test_calibrate_from_strategy_scores(tmp_path: Path):
    _, runs = _run(tmp_path, "toyworld", {"n_items": 400, "K": 4})
    scores = runs[0] / "strategies_exact.csv"
    code, cal = _run(
        tmp_path,
        "calibrate",
        {
            "scores": str(scores),
            "strategy": "ORIGINAL_X",
            "calibration": {"alpha": 1.0},
            "deploy_scores": str(scores),
        },
    )
    assert code == EXIT_OK
    deployment = json.loads((cal[0] / "deployment.json").read_text(encoding="utf-8"))
    assert deployment["n_items"] == 400


def test_verbose_and_quiet_conflict(tmp_path: Path):
    assert main(["-v", "-q", "toyworld", "--out", str(tmp_path)]) == EXIT_CONFIG
