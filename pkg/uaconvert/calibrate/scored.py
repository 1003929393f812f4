from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from ..errors import DatasetError


def read_scores(
    path: str | Path, strategy: Optional[str] = None, label_index: Optional[int] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (scores, true_labels) from a CSV with `score` and `true_label` columns. When
    the file also has `strategy` / `label_index` columns, rows are filtered by them.
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise DatasetError(f"{path}: no scored rows")
    for col in ("score", "true_label"):
        if col not in rows[0]:
            raise DatasetError(f"{path}: missing column {col!r}")
    scores, labels = [], []
    for i, row in enumerate(rows):
        if strategy is not None and "strategy" in row and row["strategy"] != strategy:
            continue
        if label_index is not None and "label_index" in row:
            if int(row["label_index"]) != label_index:
                continue
        try:
            s = float(row["score"])
            c = int(row["true_label"])
        except ValueError as e:
            raise DatasetError(f"unparseable score row: {e}", row=i) from e
        if not (math.isfinite(s) and 0.0 <= s <= 1.0):
            raise DatasetError(f"score {s} outside [0, 1]", row=i)
        if c not in (0, 1):
            raise DatasetError(f"true_label {c} is not binary", row=i)
        scores.append(s)
        labels.append(c)
    if not scores:
        raise DatasetError(f"{path}: no rows for strategy={strategy} label_index={label_index}")
    return np.asarray(scores), np.asarray(labels, dtype=np.int8)
