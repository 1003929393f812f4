from __future__ import annotations

import csv
import html
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence, Tuple

import numpy as np

from ..core.dataset import format_float


def format_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(v)
    return str(v)


def jsonable(obj: Any) -> Any:
    """Plain JSON types; numpy scalars/arrays unwrapped, non-finite floats -> None."""
    if isinstance(obj, Mapping):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, Path):
        return obj.as_posix()
    return obj


def _prepare(path: str | Path) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    return target


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    target = _prepare(path)
    with open(target, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(list(header))
        for row in rows:
            w.writerow([format_cell(v) for v in row])
    return target


def write_json(path: str | Path, obj: Any) -> Path:
    target = _prepare(path)
    text = json.dumps(jsonable(obj), ensure_ascii=False, indent=2, sort_keys=True)
    target.write_text(text + "\n", encoding="utf-8")
    return target


def curve_csv(path: str | Path, curve, x_name: str = "x", y_name: str = "y") -> Path:
    """Write a CurvePoints-like object (`xs`, `ys`) as a two-column CSV."""
    return write_csv(path, [x_name, y_name], zip(curve.xs, curve.ys))


# ---------------------------
# SVG
# ---------------------------

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _bounds(values: np.ndarray) -> Tuple[float, float]:
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi - lo < 1e-12:
        lo, hi = lo - 0.5, hi + 0.5
    return lo, hi


def svg_plot(
    path: str | Path,
    series: Mapping[str, Any],
    title: str = "",
    x_label: str = "x",
    y_label: str = "y",
    width: int = 480,
    height: int = 360,
) -> Path:
    """
    Minimal line plot: one polyline per named curve (anything with `xs`/`ys`),
    a frame with min/max tick labels and a legend. Never touches CSV content.
    """
    margin = 48
    pts = [(name, np.asarray(c.xs, float), np.asarray(c.ys, float)) for name, c in series.items()]
    pts = [(n, x, y) for n, x, y in pts if x.size]
    all_x = np.concatenate([p[1] for p in pts]) if pts else np.array([0.0, 1.0])
    all_y = np.concatenate([p[2] for p in pts]) if pts else np.array([0.0, 1.0])
    x0, x1 = _bounds(all_x)
    y0, y1 = _bounds(all_y)
    pw, ph = width - 2 * margin, height - 2 * margin

    def sx(v: float) -> float:
        return margin + (v - x0) / (x1 - x0) * pw

    def sy(v: float) -> float:
        return height - margin - (v - y0) / (y1 - y0) * ph

    esc = html.escape
    lines = [
        f"<svg xmlns='http://www.w3.org/2000/svg' width='{width}' height='{height}' "
        f"font-family='sans-serif' font-size='11'>",
        f"<rect x='{margin}' y='{margin}' width='{pw}' height='{ph}' fill='none' stroke='#444'/>",
        f"<text x='{width / 2:.1f}' y='{margin / 2:.1f}' text-anchor='middle' "
        f"font-size='13'>{esc(title)}</text>",
        f"<text x='{width / 2:.1f}' y='{height - 8}' text-anchor='middle'>{esc(x_label)}</text>",
        f"<text x='12' y='{height / 2:.1f}' text-anchor='middle' "
        f"transform='rotate(-90 12 {height / 2:.1f})'>{esc(y_label)}</text>",
        f"<text x='{margin}' y='{height - margin + 14}' text-anchor='middle'>{x0:.3g}</text>",
        f"<text x='{width - margin}' y='{height - margin + 14}' "
        f"text-anchor='middle'>{x1:.3g}</text>",
        f"<text x='{margin - 4}' y='{height - margin}' text-anchor='end'>{y0:.3g}</text>",
        f"<text x='{margin - 4}' y='{margin + 4}' text-anchor='end'>{y1:.3g}</text>",
    ]
    for i, (name, xs, ys) in enumerate(pts):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
        lines.append(
            f"<polyline fill='none' stroke='{color}' stroke-width='1.5' points='{coords}'/>"
        )
        ly = margin + 14 + 14 * i
        lines.append(
            f"<line x1='{width - margin - 90}' y1='{ly - 4}' x2='{width - margin - 74}' "
            f"y2='{ly - 4}' stroke='{color}' stroke-width='2'/>"
        )
        lines.append(f"<text x='{width - margin - 70}' y='{ly}'>{esc(name)}</text>")
    lines.append("</svg>")
    target = _prepare(path)
    target.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return target
