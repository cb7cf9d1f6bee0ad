"""Minimal deterministic SVG charts (line, bar, heatmap).

Every number is written with fixed precision and elements are emitted in
input order, so identical data always produces identical bytes.
"""

from __future__ import annotations

import math
from html import escape
from typing import Sequence

W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 64, 150, 36, 48
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf")


def _f(v: float) -> str:
    return f"{v:.2f}"


def _finite(values) -> list[float]:
    return [float(v) for v in values if v is not None and math.isfinite(v)]


def _range(values: list[float], pad_zero: bool = False) -> tuple[float, float]:
    lo, hi = (min(values), max(values)) if values else (0.0, 1.0)
    if pad_zero:
        lo = min(lo, 0.0)
    if hi == lo:
        hi = lo + 1.0
    return lo, hi


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _label(v: float) -> str:
    return f"{v:.0f}" if abs(v) >= 100 or v == int(v) else f"{v:.2f}"


def _frame(title: str, xlabel: str, ylabel: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="#ffffff"/>',
        f'<text x="{W / 2:.0f}" y="20" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{(LEFT + W - RIGHT) / 2:.0f}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{(TOP + H - BOTTOM) / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {(TOP + H - BOTTOM) / 2:.0f})">{escape(ylabel)}</text>',
    ]


def _axes(xlo, xhi, ylo, yhi, xticks=None) -> tuple[list[str], callable, callable]:
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - xlo) / (xhi - xlo) * pw

    def sy(y):
        return TOP + ph - (y - ylo) / (yhi - ylo) * ph

    out = [f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>']
    for y in _ticks(ylo, yhi):
        out.append(f'<line x1="{LEFT - 4}" y1="{_f(sy(y))}" x2="{LEFT + pw}" y2="{_f(sy(y))}" stroke="#dddddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{_f(sy(y) + 4)}" text-anchor="end">{_label(y)}</text>')
    for x in (xticks if xticks is not None else _ticks(xlo, xhi)):
        out.append(f'<text x="{_f(sx(x))}" y="{TOP + ph + 16}" text-anchor="middle">{_label(x)}</text>')
    return out, sx, sy


def line_chart(series: Sequence[tuple[str, Sequence[float], Sequence[float]]], title: str,
               xlabel: str, ylabel: str, xticks: Sequence[float] | None = None) -> str:
    """``series`` is a list of ``(label, xs, ys)``; non-finite points break the line."""
    xs = _finite(x for _, sx_, _ in series for x in sx_)
    ys = _finite(y for _, _, sy_ in series for y in sy_)
    xlo, xhi = _range(xs)
    ylo, yhi = _range(ys, pad_zero=True)
    if ylo >= -1.0 and yhi <= 1.0:
        yhi = 1.0  # accuracies: keep the full [0, 1] scale
    out = _frame(title, xlabel, ylabel)
    axes, sx, sy = _axes(xlo, xhi, ylo, yhi, xticks)
    out += axes
    for i, (label, xv, yv) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        runs, cur = [], []
        for x, y in zip(xv, yv):
            if y is None or not math.isfinite(y):
                if cur:
                    runs.append(cur)
                cur = []
                continue
            cur.append(f"{_f(sx(x))},{_f(sy(y))}")
        if cur:
            runs.append(cur)
        for pts in runs:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{" ".join(pts)}"/>')
        ly = TOP + 12 + 14 * i
        out.append(f'<line x1="{W - RIGHT + 10}" y1="{ly}" x2="{W - RIGHT + 26}" y2="{ly}" stroke="{colour}" '
                   'stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT + 30}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(labels: Sequence[str], values: Sequence[float | None], title: str, xlabel: str, ylabel: str) -> str:
    """Vertical bars; ``None`` values are drawn as an empty slot marked with a dash."""
    vals = _finite(values)
    ylo, yhi = _range(vals, pad_zero=True)
    out = _frame(title, xlabel, ylabel)
    axes, _, sy = _axes(0, max(len(labels), 1), ylo, yhi, xticks=[])
    out += axes
    pw = W - LEFT - RIGHT
    step = pw / max(len(labels), 1)
    for i, (lab, v) in enumerate(zip(labels, values)):
        x = LEFT + i * step
        if v is not None and math.isfinite(v):
            top = sy(max(v, 0.0))
            out.append(f'<rect x="{_f(x + step * 0.15)}" y="{_f(top)}" width="{_f(step * 0.7)}" '
                       f'height="{_f(sy(0.0) - top)}" fill="{PALETTE[0]}"/>')
        else:
            out.append(f'<text x="{_f(x + step / 2)}" y="{_f(sy(0.0) - 3)}" text-anchor="middle">-</text>')
        out.append(f'<text x="{_f(x + step / 2)}" y="{H - BOTTOM + 14}" text-anchor="middle">{escape(lab)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heatmap(matrix: Sequence[Sequence[float]], row_labels: Sequence[str], col_labels: Sequence[str],
            title: str) -> str:
    """Row-normalised heatmap (each row scaled by its own sum), white to dark blue."""
    rows = len(row_labels)
    cols = len(col_labels)
    size = max(6.0, min(18.0, 520.0 / max(rows, cols, 1)))
    x0, y0 = 70, 50
    width = int(x0 + cols * size + 20)
    height = int(y0 + rows * size + 30)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="9">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
    ]
    for j, lab in enumerate(col_labels):
        out.append(f'<text x="{_f(x0 + (j + 0.5) * size)}" y="{y0 - 4}" text-anchor="middle">{escape(lab)}</text>')
    for i, (lab, row) in enumerate(zip(row_labels, matrix)):
        total = sum(row)
        y = y0 + i * size
        out.append(f'<text x="{x0 - 4}" y="{_f(y + size * 0.75)}" text-anchor="end">{escape(lab)}</text>')
        for j, v in enumerate(row):
            frac = v / total if total else 0.0
            shade = round(255 * (1.0 - frac))
            fill = f"#{shade:02x}{shade:02x}ff" if frac > 0 else "#ffffff"
            out.append(f'<rect x="{_f(x0 + j * size)}" y="{_f(y)}" width="{_f(size)}" height="{_f(size)}" '
                       f'fill="{fill}" stroke="#eeeeee" stroke-width="0.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
