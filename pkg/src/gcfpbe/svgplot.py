"""Minimal dependency-free SVG line charts for moment curves."""

from __future__ import annotations

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-12 * span:
        ticks.append(v)
        v += step
    return ticks


def line_chart(series, title="", xlabel="t", ylabel="", width=720, height=480,
               logy=False):
    """Render named (x, y) series as an SVG document string.

    series - list of (label, xs, ys); y values must be positive if logy.
    """
    ml, mr, mt, mb = 70, 20, 40, 50
    pw, ph = width - ml - mr, height - mt - mb
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if logy:
        ys_all = [math.log10(y) for y in ys_all if y > 0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x):
        return ml + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        if logy:
            y = math.log10(max(y, 1e-300))
        return mt + ph - (y - y_lo) / (y_hi - y_lo) * ph

    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>',
             f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="16">{title}</text>']
    # axes and ticks
    parts.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" '
                 'fill="none" stroke="#444"/>')
    for xv in _ticks(x_lo, x_hi):
        parts.append(f'<line x1="{px(xv):.1f}" y1="{mt + ph}" x2="{px(xv):.1f}" '
                     f'y2="{mt + ph + 5}" stroke="#444"/>')
        parts.append(f'<text x="{px(xv):.1f}" y="{mt + ph + 20}" text-anchor="middle" '
                     f'font-size="11">{xv:g}</text>')
    for yv in _ticks(y_lo, y_hi):
        yy = mt + ph - (yv - y_lo) / (y_hi - y_lo) * ph
        label = f"1e{yv:g}" if logy else f"{yv:g}"
        parts.append(f'<line x1="{ml - 5}" y1="{yy:.1f}" x2="{ml}" y2="{yy:.1f}" stroke="#444"/>')
        parts.append(f'<text x="{ml - 8}" y="{yy + 4:.1f}" text-anchor="end" font-size="11">{label}</text>')
    parts.append(f'<text x="{ml + pw / 2}" y="{height - 10}" text-anchor="middle" '
                 f'font-size="13">{xlabel}</text>')
    parts.append(f'<text x="18" y="{mt + ph / 2}" text-anchor="middle" font-size="13" '
                 f'transform="rotate(-90 18 {mt + ph / 2})">{ylabel}</text>')
    # series
    for idx, (label, xs, ys) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys)
                       if not logy or y > 0)
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = mt + 16 + 16 * idx
        parts.append(f'<line x1="{ml + pw - 110}" y1="{ly}" x2="{ml + pw - 90}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{ml + pw - 84}" y="{ly + 4}" font-size="12">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
