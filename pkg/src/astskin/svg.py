"""Minimal deterministic SVG charts.

Coordinates are printed with a fixed number of decimals so identical inputs
always give identical bytes.  The output is self-contained (no external
fonts, stylesheets or scripts).
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH = 640
HEIGHT = 420
MARGIN = {"left": 70, "right": 120, "top": 40, "bottom": 55}
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _n(v: float) -> str:
    text = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    """Round tick positions covering ``[lo, hi]``."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = step * math.floor(lo / step + 1e-9)
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 10))
        t += step
    if ticks[-1] < hi:
        ticks.append(round(t, 10))
    return ticks


class _Canvas:
    def __init__(self, title: str):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
            f'<text x="{WIDTH // 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


class _Axes:
    def __init__(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def x(self, v: float) -> float:
        return self.left + (v - self.xlo) / (self.xhi - self.xlo) * (self.right - self.left)

    def y(self, v: float) -> float:
        return self.bottom - (v - self.ylo) / (self.yhi - self.ylo) * (self.bottom - self.top)

    def draw_frame(self, canvas: _Canvas, xlabel: str, ylabel: str, xticks, yticks) -> None:
        canvas.add(
            f'<rect x="{self.left}" y="{self.top}" width="{self.right - self.left}" '
            f'height="{self.bottom - self.top}" fill="none" stroke="#000000"/>'
        )
        for t in yticks:
            yy = _n(self.y(t))
            canvas.add(f'<line x1="{self.left}" y1="{yy}" x2="{self.right}" y2="{yy}" stroke="#dddddd"/>')
            canvas.add(f'<text x="{self.left - 6}" y="{yy}" text-anchor="end" dy="4">{_n(t)}</text>')
        for t in xticks:
            xx = _n(self.x(t))
            canvas.add(f'<text x="{xx}" y="{self.bottom + 16}" text-anchor="middle">{_n(t)}</text>')
        canvas.add(
            f'<text x="{(self.left + self.right) // 2}" y="{HEIGHT - 14}" '
            f'text-anchor="middle">{escape(xlabel)}</text>'
        )
        cy = (self.top + self.bottom) // 2
        canvas.add(
            f'<text x="18" y="{cy}" text-anchor="middle" '
            f'transform="rotate(-90 18 {cy})">{escape(ylabel)}</text>'
        )


def line_chart(series: dict, title: str, xlabel: str, ylabel: str) -> str:
    """``series`` maps a legend name to ``(xs, ys)``; one polyline per series."""
    xs_all = [float(v) for xs, _ in series.values() for v in xs]
    ys_all = [float(v) for _, ys in series.values() for v in ys]
    if not xs_all:
        raise ValueError("line chart needs at least one point")
    xticks = nice_ticks(min(xs_all), max(xs_all))
    yticks = nice_ticks(min(0.0, min(ys_all)), max(ys_all))
    ax = _Axes(xticks[0], xticks[-1], yticks[0], yticks[-1])
    canvas = _Canvas(title)
    ax.draw_frame(canvas, xlabel, ylabel, xticks, yticks)
    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        points = " ".join(f"{_n(ax.x(float(x)))},{_n(ax.y(float(y)))}" for x, y in zip(xs, ys))
        canvas.add(
            f'<polyline data-series="{escape(name)}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{points}"/>'
        )
        ly = ax.top + 16 + 18 * i
        canvas.add(f'<line x1="{ax.right + 12}" y1="{ly}" x2="{ax.right + 32}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        canvas.add(f'<text x="{ax.right + 38}" y="{ly + 4}">{escape(name)}</text>')
    return canvas.text()


def bar_chart(categories: list, values: list, title: str, ylabel: str, ymax: float = 100.0) -> str:
    """Vertical bars with the value printed above each bar."""
    if not categories:
        raise ValueError("bar chart needs at least one category")
    yticks = nice_ticks(0.0, ymax)
    ax = _Axes(0.0, float(len(categories)), 0.0, yticks[-1])
    canvas = _Canvas(title)
    ax.draw_frame(canvas, "", ylabel, [], yticks)
    slot = (ax.right - ax.left) / len(categories)
    for i, (cat, val) in enumerate(zip(categories, values)):
        x0 = ax.left + slot * (i + 0.2)
        top = ax.y(float(val))
        canvas.add(
            f'<rect data-category="{escape(str(cat))}" x="{_n(x0)}" y="{_n(top)}" '
            f'width="{_n(slot * 0.6)}" height="{_n(ax.bottom - top)}" fill="{PALETTE[0]}"/>'
        )
        cx = _n(ax.left + slot * (i + 0.5))
        canvas.add(f'<text x="{cx}" y="{_n(top - 5)}" text-anchor="middle">{_n(val)}</text>')
        canvas.add(f'<text x="{cx}" y="{ax.bottom + 16}" text-anchor="middle">{escape(str(cat))}</text>')
    return canvas.text()
