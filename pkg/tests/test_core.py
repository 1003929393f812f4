from pathlib import Path

import numpy as np
import pytest

from uaconvert.core import RngStream, SignalDataset, gaussian_draw, read_dataset, write_dataset
from uaconvert.core.dataset import meta_path
from uaconvert.errors import DatasetError


def test_same_stream_is_bit_identical():
    a = gaussian_draw(RngStream(7, 0), 4)
    b = gaussian_draw(RngStream(7, 0), 4)
    assert np.array_equal(a, b)


def test_stream_indices_are_independent():
    a = gaussian_draw(RngStream(7, 0), 4)
    b = gaussian_draw(RngStream(7, 1), 4)
    assert not np.array_equal(a, b)


def test_child_streams_do_not_disturb_each_other():
    root = RngStream(3)
    first = root.child(2, 5).gaussian(3)
    root.child(1).gaussian(100)
    again = root.child(2, 5).gaussian(3)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, root.child(5, 2).gaussian(3))


def test_draw_moments():
    z = gaussian_draw(RngStream(11), 100_000)
    assert abs(z.mean()) < 0.02
    assert abs(z.var() - 1.0) < 0.02


def test_rejects_invalid_seeds_and_counts():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(2**64)
    with pytest.raises(ValueError):
        gaussian_draw(RngStream(0), 0)


def test_dataset_round_trip(tmp_path: Path):
    values = np.arange(24, dtype=float).reshape(3, 8) / 7.0
    labels = np.array([[1, 0], [0, 1], [1, 1]])
    ds = SignalDataset(values, labels, sample_rate_hz=125.0, label_names=["af", "pvc"])
    path = write_dataset(tmp_path / "sigs.csv", ds)

    back = read_dataset(path)
    assert np.array_equal(back.values, values)
    assert np.array_equal(back.labels, labels)
    assert back.sample_rate_hz == 125.0
    assert back.label_names == ["af", "pvc"]
    assert meta_path(path).exists()


def test_short_row_names_row(tmp_path: Path):
    p = tmp_path / "bad.csv"
    header = ",".join(f"x_{j}" for j in range(8))
    good = ",".join("0" for _ in range(8))
    short = ",".join("0" for _ in range(7))
    p.write_text(f"{header}\n{good}\n{short}\n", encoding="utf-8")
    with pytest.raises(DatasetError) as exc:
        read_dataset(p)
    assert exc.value.row == 1


def test_non_numeric_cell_names_row_and_column(tmp_path: Path):
    p = tmp_path / "bad.csv"
    p.write_text("x_0,x_1\n1,2\n3,abc\n", encoding="utf-8")
    with pytest.raises(DatasetError) as exc:
        read_dataset(p)
    assert (exc.value.row, exc.value.column) == (1, 1)


def test_empty_file_has_no_signals(tmp_path: Path):
    p = tmp_path / "empty.csv"
    p.write_text("", encoding="utf-8")
    with pytest.raises(DatasetError, match="no signals"):
        read_dataset(p)


def test_missing_label_column_is_reported(tmp_path: Path):
    ds = SignalDataset(np.zeros((2, 3)), np.array([[0], [1]]), label_names=["c"])
    path = write_dataset(tmp_path / "d.csv", ds)
    # drop the label column but keep the sidecar declaring it
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(",".join(l.split(",")[:3]) for l in lines) + "\n", encoding="utf-8")
    with pytest.raises(DatasetError, match="missing label column"):
        read_dataset(path)
