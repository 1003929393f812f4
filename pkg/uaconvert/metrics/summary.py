from __future__ import annotations

from typing import Any, Dict, List, Sequence

import numpy as np

from ..classify.harness import StrategyResult
from .ranking import aurc, auroc, confusion_metrics, risk_coverage

METRIC_NAMES = ("auroc", "aurc", "tpr", "tnr", "f1", "accuracy")


def result_metrics(result: StrategyResult) -> Dict[str, Any]:
    """Per-label row: AUROC (None for a single-class label), AURC, TPR, TNR, F1, accuracy."""
    lab = result.true_labels
    single_class = bool(lab.all() or not lab.any())
    cm = confusion_metrics(result.decisions, lab)
    row = {
        "label_index": result.label_index,
        "auroc": None if single_class else auroc(result.scores, lab),
        "aurc": aurc(risk_coverage(result.decisions, lab, result.confidences)),
        "tpr": cm.tpr,
        "tnr": cm.tnr,
        "f1": cm.f1,
        "accuracy": float(np.mean(result.decisions == lab)),
    }
    if cm.undefined:
        row["undefined"] = list(cm.undefined)
    return row


def summarize_strategies(
    results: Sequence[StrategyResult], label_names: Sequence[str] = ()
) -> Dict[str, Any]:
    """
    {strategy: {"labels": [per-label rows], "macro": {metric: mean over labels}}},
    the per-condition plus macro layout used for the summary JSON.
    """
    by_strategy: Dict[str, List[Dict[str, Any]]] = {}
    for r in results:
        row = result_metrics(r)
        if label_names:
            row["label"] = label_names[r.label_index]
        by_strategy.setdefault(r.strategy.value, []).append(row)
    out: Dict[str, Any] = {}
    for strategy, rows in by_strategy.items():
        macro = {}
        for name in METRIC_NAMES:
            vals = [row[name] for row in rows if row[name] is not None]
            macro[name] = float(np.mean(vals)) if vals else None
        out[strategy] = {"labels": rows, "macro": macro}
    return out
