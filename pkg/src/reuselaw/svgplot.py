"""Static SVG 1.1 chart emission, dependency-free and byte-deterministic.

Three chart kinds are provided: a log-log rank-frequency scatter with a
fitted line and a family of c/n guide curves, a log-log growth curve, and a
histogram with a standard-normal overlay.  All output is self-contained
(inline styles, no external resources) and numerically formatted with fixed
precision so identical inputs produce identical bytes.
"""

from __future__ import annotations

import math
from typing import Optional, Sequence

WIDTH, HEIGHT = 640, 440
ML, MR, MT, MB = 70, 24, 34, 52

_HEADER = (
    '<?xml version="1.0" encoding="UTF-8"?>\n'
    f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
    f'viewBox="0 0 {WIDTH} {HEIGHT}" version="1.1">\n'
    f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>\n'
)
_FOOTER = "</svg>\n"


def _f(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    """Maps data space onto the pixel plot area; axes may be log10."""

    def __init__(self, xlim, ylim, xlog=False, ylog=False):
        self.xlog, self.ylog = xlog, ylog
        self.x0 = math.log10(xlim[0]) if xlog else xlim[0]
        self.x1 = math.log10(xlim[1]) if xlog else xlim[1]
        self.y0 = math.log10(ylim[0]) if ylog else ylim[0]
        self.y1 = math.log10(ylim[1]) if ylog else ylim[1]
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0

    def px(self, x: float) -> float:
        v = math.log10(x) if self.xlog else x
        return ML + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - ML - MR)

    def py(self, y: float) -> float:
        v = math.log10(y) if self.ylog else y
        return HEIGHT - MB - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - MT - MB)


def _text(x, y, s, size=12, anchor="middle", color="#333333"):
    return (f'<text x="{_f(x)}" y="{_f(y)}" font-family="monospace" '
            f'font-size="{size}" text-anchor="{anchor}" fill="{color}">{s}</text>')


def _polyline(points, color, width=1.5, dash=None):
    coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in points)
    d = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{d}/>')


def _decade_ticks(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1))


def _tick_label(k: int) -> str:
    return str(10 ** k) if 0 <= k <= 4 else f"1e{k}"


def _log_axes(frame: _Frame, xlabel: str, ylabel: str) -> list[str]:
    parts = []
    x_axis_y = HEIGHT - MB
    parts.append(_polyline([(ML, MT), (ML, x_axis_y), (WIDTH - MR, x_axis_y)],
                           "#000000", 1.0))
    for k in _decade_ticks(10 ** frame.x0, 10 ** frame.x1):
        if not frame.x0 <= k <= frame.x1:
            continue
        x = frame.px(10 ** k)
        parts.append(_polyline([(x, x_axis_y), (x, x_axis_y + 5)], "#000000", 1.0))
        parts.append(_text(x, x_axis_y + 18, _tick_label(k)))
    for k in _decade_ticks(10 ** frame.y0, 10 ** frame.y1):
        if not frame.y0 <= k <= frame.y1:
            continue
        y = frame.py(10 ** k)
        parts.append(_polyline([(ML - 5, y), (ML, y)], "#000000", 1.0))
        parts.append(_text(ML - 8, y + 4, _tick_label(k), anchor="end"))
    parts.append(_text((ML + WIDTH - MR) / 2, HEIGHT - 12, xlabel))
    parts.append(f'<g transform="translate(16,{(MT + HEIGHT - MB) / 2}) rotate(-90)">'
                 + _text(0, 0, ylabel) + "</g>")
    return parts


def render_rank_frequency(
    entries: Sequence[tuple[int, int, float]],
    fit: Optional[dict] = None,
    title: str = "component reuse by rank",
) -> str:
    """Log-log scatter of reference counts with the fitted power law and a
    dotted family of c/n guide curves."""
    ranks = [e[0] for e in entries]
    counts = [max(e[1], 1) for e in entries]
    xlim = (min(ranks), max(max(ranks), min(ranks) * 10))
    ylim = (min(counts), max(max(counts), min(counts) * 10))
    fr = _Frame((10 ** math.floor(math.log10(xlim[0])), 10 ** math.ceil(math.log10(xlim[1]))),
                (10 ** math.floor(math.log10(ylim[0])), 10 ** math.ceil(math.log10(ylim[1]))),
                xlog=True, ylog=True)
    parts = [_HEADER, _text(WIDTH / 2, 20, title, size=14)]
    parts += _log_axes(fr, "rank", "references")

    # c/n guide family, dotted, one curve per decade of c crossing the frame
    for k in range(math.floor(fr.y0), math.ceil(fr.y1 + fr.x1) + 1):
        c = 10.0 ** k
        pts = []
        for t in range(0, 101):
            x = 10.0 ** (fr.x0 + (fr.x1 - fr.x0) * t / 100.0)
            y = c / x
            if 10 ** fr.y0 <= y <= 10 ** fr.y1:
                pts.append((fr.px(x), fr.py(y)))
        if len(pts) >= 2:
            parts.append(_polyline(pts, "#999999", 0.8, dash="3,3"))

    for rank, count in zip(ranks, counts):
        parts.append(f'<circle cx="{_f(fr.px(rank))}" cy="{_f(fr.py(count))}" '
                     'r="1.8" fill="#1f5fa8" fill-opacity="0.7"/>')

    if fit is not None:
        a = fit["exponent"]
        scale = 2.0 ** fit["log_scale"]
        pts = []
        for t in range(0, 101):
            x = 10.0 ** (fr.x0 + (fr.x1 - fr.x0) * t / 100.0)
            y = scale * x ** (-a)
            if 10 ** fr.y0 <= y <= 10 ** fr.y1:
                pts.append((fr.px(x), fr.py(y)))
        if len(pts) >= 2:
            parts.append(_polyline(pts, "#c03020", 1.5))
        parts.append(_text(WIDTH - MR - 6, MT + 14,
                           f"exponent {a:.3f}, r2 {fit['r_squared']:.4f}",
                           anchor="end", color="#c03020"))
    parts.append(_FOOTER)
    return "\n".join(parts)


def render_heaps(
    curve: Sequence[tuple[int, int]],
    fit: Optional[dict] = None,
    title: str = "distinct components vs corpus size",
) -> str:
    """Log-log vocabulary-growth curve with its fitted power law."""
    xs = [max(b, 1) for b, _ in curve]
    ys = [max(v, 1) for _, v in curve]
    fr = _Frame((10 ** math.floor(math.log10(min(xs))), 10 ** math.ceil(math.log10(max(xs)))),
                (10 ** math.floor(math.log10(min(ys))), 10 ** math.ceil(math.log10(max(ys)))),
                xlog=True, ylog=True)
    parts = [_HEADER, _text(WIDTH / 2, 20, title, size=14)]
    parts += _log_axes(fr, "bits examined", "distinct components")
    parts.append(_polyline([(fr.px(x), fr.py(y)) for x, y in zip(xs, ys)],
                           "#1f5fa8", 1.5))
    if fit is not None:
        a = fit["exponent"]
        scale = 2.0 ** fit["log_scale"]
        pts = []
        for t in range(0, 101):
            x = 10.0 ** (fr.x0 + (fr.x1 - fr.x0) * t / 100.0)
            y = scale * x ** a
            if 10 ** fr.y0 <= y <= 10 ** fr.y1:
                pts.append((fr.px(x), fr.py(y)))
        if len(pts) >= 2:
            parts.append(_polyline(pts, "#c03020", 1.2, dash="6,3"))
        parts.append(_text(WIDTH - MR - 6, MT + 14, f"alpha {a:.3f}",
                           anchor="end", color="#c03020"))
    parts.append(_FOOTER)
    return "\n".join(parts)


def render_histogram(
    values: Sequence[float],
    bins: int = 24,
    title: str = "normalized distinct-component counts",
) -> str:
    """Density histogram with a standard-normal overlay."""
    if not values:
        raise ValueError("histogram needs at least one value")
    lo = min(min(values), -4.0)
    hi = max(max(values), 4.0)
    width = (hi - lo) / bins
    heights = [0] * bins
    for v in values:
        idx = min(int((v - lo) / width), bins - 1)
        heights[idx] += 1
    n = len(values)
    density = [h / (n * width) for h in heights]
    peak = max(max(density), 1.0 / math.sqrt(2 * math.pi))
    fr = _Frame((lo, hi), (0.0, peak * 1.15))

    parts = [_HEADER, _text(WIDTH / 2, 20, title, size=14)]
    x_axis_y = HEIGHT - MB
    parts.append(_polyline([(ML, MT), (ML, x_axis_y), (WIDTH - MR, x_axis_y)],
                           "#000000", 1.0))
    for k in range(math.ceil(lo), math.floor(hi) + 1):
        x = fr.px(k)
        parts.append(_polyline([(x, x_axis_y), (x, x_axis_y + 5)], "#000000", 1.0))
        parts.append(_text(x, x_axis_y + 18, str(k)))
    parts.append(_text((ML + WIDTH - MR) / 2, HEIGHT - 12, "normalized value"))
    parts.append(f'<g transform="translate(16,{(MT + HEIGHT - MB) / 2}) rotate(-90)">'
                 + _text(0, 0, "density") + "</g>")

    for i, d in enumerate(density):
        if d <= 0:
            continue
        x0 = fr.px(lo + i * width)
        x1 = fr.px(lo + (i + 1) * width)
        y = fr.py(d)
        parts.append(f'<rect x="{_f(x0)}" y="{_f(y)}" width="{_f(x1 - x0)}" '
                     f'height="{_f(x_axis_y - y)}" fill="#1f5fa8" fill-opacity="0.5" '
                     'stroke="#1f5fa8" stroke-width="0.5"/>')

    pts = []
    for t in range(0, 201):
        x = lo + (hi - lo) * t / 200.0
        y = math.exp(-x * x / 2.0) / math.sqrt(2 * math.pi)
        pts.append((fr.px(x), fr.py(y)))
    parts.append(_polyline(pts, "#c03020", 1.5))
    parts.append(_FOOTER)
    return "\n".join(parts)
