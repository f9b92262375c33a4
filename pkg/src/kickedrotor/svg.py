"""Minimal SVG line plots (axes, optional log scales, legend).

The CSV files remain the authoritative output; these plots are for a quick
look without a plotting library.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import numpy as np

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 20, 50


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0 ** k for k in range(math.floor(lo), math.ceil(hi) + 1) if lo <= k <= hi]
    span = hi - lo or 1.0
    step = 10 ** math.floor(math.log10(span / 5))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    return list(np.arange(start, hi + step * 1e-9, step))


def _fmt(v: float) -> str:
    if v != 0 and (abs(v) >= 1e4 or abs(v) < 1e-2):
        return f"{v:.0e}"
    return f"{v:g}"


def line_plot(curves: Sequence[tuple[np.ndarray, np.ndarray]], labels: Sequence[str],
              path: str | Path, logx: bool = False, logy: bool = False,
              xlabel: str = "", ylabel: str = "", ymin_log: float = 1e-16) -> None:
    """Write an SVG with one polyline per ``(x, y)`` curve."""
    prepared = []
    for x, y in curves:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > ymin_log
        x, y = x[keep], y[keep]
        prepared.append((np.log10(x) if logx else x, np.log10(y) if logy else y))
    xs = np.concatenate([c[0] for c in prepared]) if prepared else np.zeros(1)
    ys = np.concatenate([c[1] for c in prepared]) if prepared else np.zeros(1)
    if xs.size == 0:
        xs = ys = np.zeros(1)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * (W - LEFT - RIGHT)

    def py(v):
        return H - BOTTOM - (v - y0) / (y1 - y0) * (H - TOP - BOTTOM)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'font-family="sans-serif" font-size="11">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<rect x="{LEFT}" y="{TOP}" width="{W - LEFT - RIGHT}" '
           f'height="{H - TOP - BOTTOM}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1, logx):
        v = math.log10(t) if logx else t
        out.append(f'<line x1="{px(v):.1f}" y1="{H - BOTTOM}" x2="{px(v):.1f}" '
                   f'y2="{H - BOTTOM + 4}" stroke="black"/>')
        out.append(f'<text x="{px(v):.1f}" y="{H - BOTTOM + 16}" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for t in _ticks(y0, y1, logy):
        v = math.log10(t) if logy else t
        out.append(f'<line x1="{LEFT - 4}" y1="{py(v):.1f}" x2="{LEFT}" y2="{py(v):.1f}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{LEFT - 6}" y="{py(v) + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    out.append(f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 12}" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="16" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(TOP + H - BOTTOM) / 2})">{ylabel}</text>')
    for i, ((x, y), label) in enumerate(zip(prepared, labels)):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        ly = TOP + 14 + 14 * i
        out.append(f'<line x1="{W - RIGHT - 110}" y1="{ly - 4}" x2="{W - RIGHT - 90}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT - 86}" y="{ly}">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
