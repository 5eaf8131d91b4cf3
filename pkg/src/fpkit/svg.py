"""Minimal deterministic SVG writer for line plots and heatmaps.

No plotting dependency: figures the CLI emits are assembled from a handful
of SVG primitives with fixed float formatting, so regenerating a figure from
the same data produces the same bytes. Axes are linear or log10; log axes
require positive data.
"""

from __future__ import annotations

import math
from typing import Sequence

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 420
_ML, _MR, _MT, _MB = 64, 16, 34, 46


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        lo_e, hi_e = math.floor(lo + 1e-12), math.ceil(hi - 1e-12)
        return [float(e) for e in range(int(lo_e), int(hi_e) + 1)]
    span = hi - lo
    if span <= 0:
        return [lo]
    step = 10.0 ** math.floor(math.log10(span / 4.0))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * abs(span):
        out.append(round(t, 12))
        t += step
    return out


def _tick_label(v: float, log: bool) -> str:
    if log:
        return f"1e{int(round(v))}"
    return f"{v:g}"


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}">',
            f'<rect width="{_W}" height="{_H}" fill="white"/>',
            f'<text x="{_W / 2:.0f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{_esc(title)}</text>',
            f'<text x="{_W / 2:.0f}" y="{_H - 8}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>',
            f'<text x="14" y="{_H / 2:.0f}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="12" transform="rotate(-90 14 {_H / 2:.0f})">{_esc(ylabel)}</text>',
        ]

    def add(self, s: str):
        self.parts.append(s)

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _transformed(vals, log: bool, name: str):
    import numpy as np
    a = np.asarray(vals, dtype=float)
    if log:
        if (a <= 0).any():
            raise ValueError(f"log axis needs positive {name} data")
        return np.log10(a)
    return a


def line_plot(path: str, series: Sequence[tuple], title: str = "", xlabel: str = "x",
              ylabel: str = "y", logx: bool = False, logy: bool = False):
    """Write a multi-series line plot. series = [(label, xs, ys), ...]."""
    import numpy as np

    if not series:
        raise ValueError("need at least one series")
    xs_all = np.concatenate([_transformed(s[1], logx, "x") for s in series])
    ys_all = np.concatenate([_transformed(s[2], logy, "y") for s in series])
    x_lo, x_hi = float(xs_all.min()), float(xs_all.max())
    y_lo, y_hi = float(ys_all.min()), float(ys_all.max())
    if x_hi - x_lo <= 0:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi - y_lo <= 0:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def px(v):
        return _ML + (v - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(v):
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    c = _Canvas(title, xlabel, ylabel)
    c.add(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" '
          f'fill="none" stroke="#333" stroke-width="1"/>')
    for t in _ticks(x_lo, x_hi, logx):
        if not (x_lo - 1e-12 <= t <= x_hi + 1e-12):
            continue
        c.add(f'<line x1="{_fmt(px(t))}" y1="{_H - _MB}" x2="{_fmt(px(t))}" '
              f'y2="{_H - _MB + 5}" stroke="#333"/>')
        c.add(f'<text x="{_fmt(px(t))}" y="{_H - _MB + 18}" text-anchor="middle" '
              f'font-family="sans-serif" font-size="11">{_tick_label(t, logx)}</text>')
    for t in _ticks(y_lo, y_hi, logy):
        if not (y_lo - 1e-12 <= t <= y_hi + 1e-12):
            continue
        c.add(f'<line x1="{_ML - 5}" y1="{_fmt(py(t))}" x2="{_ML}" '
              f'y2="{_fmt(py(t))}" stroke="#333"/>')
        c.add(f'<text x="{_ML - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end" '
              f'font-family="sans-serif" font-size="11">{_tick_label(t, logy)}</text>')
    for si, (label, xs, ys) in enumerate(series):
        xv = _transformed(xs, logx, "x")
        yv = _transformed(ys, logy, "y")
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(xv, yv))
        color = _PALETTE[si % len(_PALETTE)]
        c.add(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if label:
            yl = _MT + 16 + 16 * si
            c.add(f'<line x1="{_W - _MR - 120}" y1="{yl - 4}" x2="{_W - _MR - 96}" '
                  f'y2="{yl - 4}" stroke="{color}" stroke-width="1.5"/>')
            c.add(f'<text x="{_W - _MR - 90}" y="{yl}" font-family="sans-serif" '
                  f'font-size="11">{_esc(label)}</text>')
    with open(path, "w") as fh:
        fh.write(c.finish())


def heatmap(path: str, values, extent: float, title: str = "", max_blocks: int = 64):
    """Write a grayscale heatmap of a square array over [-extent, extent]^2.

    Large arrays are block-averaged down to at most max_blocks per side to
    keep the file small.
    """
    import numpy as np

    v = np.asarray(values, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError("heatmap needs a square 2D array")
    n = v.shape[0]
    if n > max_blocks:
        f = n // max_blocks
        m = (n // f) * f
        v = v[:m, :m].reshape(m // f, f, m // f, f).mean(axis=(1, 3))
    lo, hi = float(v.min()), float(v.max())
    span = hi - lo if hi > lo else 1.0
    c = _Canvas(title, "x1", "x2")
    side = min(_W - _ML - _MR, _H - _MT - _MB)
    cell = side / v.shape[0]
    for i in range(v.shape[0]):
        for j in range(v.shape[1]):
            # grid rows follow ascending x1; SVG y grows downward
            shade = int(round(255 * (1.0 - (v[i, j] - lo) / span)))
            x = _ML + i * cell
            y = _MT + side - (j + 1) * cell
            c.add(f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(cell + 0.5)}" '
                  f'height="{_fmt(cell + 0.5)}" fill="rgb({shade},{shade},{shade})"/>')
    c.add(f'<rect x="{_ML}" y="{_MT}" width="{_fmt(side)}" height="{_fmt(side)}" '
          f'fill="none" stroke="#333"/>')
    c.add(f'<text x="{_ML}" y="{_MT + side + 16}" font-family="sans-serif" font-size="11">'
          f'[-{extent:g}, {extent:g}]^2, values [{lo:.4g}, {hi:.4g}]</text>')
    with open(path, "w") as fh:
        fh.write(c.finish())
