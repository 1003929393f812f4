from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from ..errors import DatasetError
from .schema import LabeledSignal, Signal, frozen_array

logger = logging.getLogger(__name__)

LABEL_PREFIX = "label_"
VALUE_PREFIX = "x_"


def format_float(v: float) -> str:
    """17 significant digits: enough to round-trip any float64, locale-free."""
    return format(float(v), ".17g")


def meta_path(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".meta.json")


@dataclass(frozen=True, eq=False)
class SignalDataset:
    """n signals of common length d (rows of `values`) with optional n x L binary labels."""

    values: np.ndarray
    labels: Optional[np.ndarray] = None
    sample_rate_hz: float = 1.0
    label_names: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        vals = frozen_array(self.values, 2, "SignalDataset.values")
        if vals.shape[0] == 0:
            raise DatasetError("no signals")
        object.__setattr__(self, "values", vals)
        if self.labels is not None:
            lab = np.array(self.labels, dtype=np.int8)
            if lab.ndim == 1:
                lab = lab[:, None]
            if lab.shape[0] != vals.shape[0]:
                raise DatasetError(f"{lab.shape[0]} label rows for {vals.shape[0]} signals")
            if not np.all((lab == 0) | (lab == 1)):
                raise DatasetError("labels must be 0 or 1")
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)
            if not self.label_names:
                names = [f"{LABEL_PREFIX}{j}" for j in range(lab.shape[1])]
                object.__setattr__(self, "label_names", names)

    @property
    def n_signals(self) -> int:
        return int(self.values.shape[0])

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    @property
    def n_labels(self) -> int:
        return 0 if self.labels is None else int(self.labels.shape[1])

    def signal(self, i: int) -> Signal:
        return Signal(self.values[i], self.sample_rate_hz)

    def labeled(self) -> List[LabeledSignal]:
        if self.labels is None:
            raise DatasetError("dataset carries no labels")
        return [LabeledSignal(self.signal(i), self.labels[i]) for i in range(self.n_signals)]


def write_dataset(path: str | Path, dataset: SignalDataset) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    header = [f"{VALUE_PREFIX}{j}" for j in range(dataset.d)]
    header += [f"{LABEL_PREFIX}{j}" for j in range(dataset.n_labels)]
    with open(target, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for i in range(dataset.n_signals):
            row = [format_float(v) for v in dataset.values[i]]
            if dataset.labels is not None:
                row += [str(int(c)) for c in dataset.labels[i]]
            w.writerow(row)
    meta = {
        "sample_rate_hz": dataset.sample_rate_hz,
        "d": dataset.d,
        "n_signals": dataset.n_signals,
        "label_names": list(dataset.label_names),
    }
    text = json.dumps(meta, indent=2, sort_keys=True) + "\n"
    meta_path(target).write_text(text, encoding="utf-8")
    return target


def _parse_cell(cell: str, row: int, column: int) -> float:
    try:
        v = float(cell.strip())
    except ValueError:
        raise DatasetError(f"non-numeric cell {cell!r}", row=row, column=column) from None
    if not np.isfinite(v):
        raise DatasetError(f"non-finite cell {cell!r}", row=row, column=column)
    return v


def _read_meta(path: Path) -> dict:
    mp = meta_path(path)
    if not mp.exists():
        logger.warning("no sidecar %s; assuming sample_rate_hz=1", mp.name)
        return {}
    try:
        return json.loads(mp.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DatasetError(f"invalid sidecar {mp.name}: {e}") from e


def read_dataset(path: str | Path) -> SignalDataset:
    """
    Read a signal CSV (header row, one signal per data row, trailing `label_*`
    columns) together with its `.meta.json` sidecar.
    """
    src = Path(path)
    meta = _read_meta(src)
    with open(src, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError("no signals") from None
        rows = [r for r in reader if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError("no signals")

    label_cols = [j for j, h in enumerate(header) if h.startswith(LABEL_PREFIX)]
    if label_cols and label_cols != list(range(label_cols[0], len(header))):
        raise DatasetError("label columns must trail the value columns")
    n_values = label_cols[0] if label_cols else len(header)
    declared = meta.get("label_names") or []
    if len(declared) > len(label_cols):
        raise DatasetError(
            f"missing label column: sidecar declares {len(declared)}, header has {len(label_cols)}",
            column=len(header),
        )
    if "d" in meta and int(meta["d"]) != n_values:
        raise DatasetError(f"header has {n_values} value columns, sidecar declares d={meta['d']}")

    values = np.empty((len(rows), n_values))
    labels = np.empty((len(rows), len(label_cols)), dtype=np.int8) if label_cols else None
    for i, cells in enumerate(rows):
        if len(cells) != len(header):
            raise DatasetError(f"expected {len(header)} cells, found {len(cells)}", row=i)
        for j in range(n_values):
            values[i, j] = _parse_cell(cells[j], i, j)
        if labels is not None:
            for k, j in enumerate(label_cols):
                cell = cells[j].strip()
                if cell not in ("0", "1"):
                    raise DatasetError(f"label cell {cell!r} is not 0/1", row=i, column=j)
                labels[i, k] = int(cell)

    return SignalDataset(
        values=values,
        labels=labels,
        sample_rate_hz=float(meta.get("sample_rate_hz", 1.0)),
        label_names=list(declared) if labels is not None else [],
    )


def dataset_from_signals(
    signals: Sequence[Signal], labels: Optional[np.ndarray] = None
) -> SignalDataset:
    if not signals:
        raise DatasetError("no signals")
    rate = signals[0].sample_rate_hz
    lengths = {s.d for s in signals}
    if len(lengths) != 1:
        raise DatasetError(f"signals differ in length: {sorted(lengths)}")
    return SignalDataset(np.stack([s.values for s in signals]), labels, rate)
