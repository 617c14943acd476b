"""Self-contained SVG emission for sweep results.

One log-log polyline of mean excess error against training-set size per
learner, written as plain SVG 1.1 elements with fixed-precision coordinates
so output bytes are reproducible. No plotting dependency on purpose: the CLI
only needs to display sweep results.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, List, Tuple

__all__ = ["render_excess_svg"]

_WIDTH, _HEIGHT = 640, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 70, 160, 20, 50

_PALETTE = ("#1b6ca8", "#c8401f", "#2d8a4e", "#7a3fa0", "#a07b18")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_excess_svg(series: Dict[str, List[Tuple[int, Fraction]]]) -> str:
    """Render mean-excess-vs-m curves (one polyline per learner).

    ``series`` maps learner name to (m, mean excess) points in grid order.
    Points with nonpositive excess cannot be drawn on log axes and are
    dropped from the polyline (the learner keeps its, possibly empty,
    polyline element).
    """
    xs = [math.log10(m) for pts in series.values() for m, _ in pts]
    ys = [math.log10(float(e)) for pts in series.values() for _, e in pts if e > 0]
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y_lo, y_hi = (min(ys), max(ys)) if ys else (-2.0, 0.0)
    if x_hi - x_lo < 1e-9:
        x_hi = x_lo + 1.0
    if y_hi - y_lo < 1e-9:
        y_hi = y_lo + 1.0

    plot_w = _WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect x="0" y="0" width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{_HEIGHT - _MARGIN_B}" stroke="black" stroke-width="1"/>',
        f'<line x1="{_MARGIN_L}" y1="{_HEIGHT - _MARGIN_B}" x2="{_WIDTH - _MARGIN_R}" '
        f'y2="{_HEIGHT - _MARGIN_B}" stroke="black" stroke-width="1"/>',
        f'<text x="{_MARGIN_L + plot_w / 2:.0f}" y="{_HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle" font-family="sans-serif">training size m (log)</text>',
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.0f}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.0f})">'
        f"mean excess error (log)</text>",
    ]

    # x ticks at the data's m values, y ticks at integer powers of ten
    m_values = sorted({m for pts in series.values() for m, _ in pts})
    for m in m_values:
        x = px(math.log10(m))
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_HEIGHT - _MARGIN_B}" x2="{_fmt(x)}" '
            f'y2="{_HEIGHT - _MARGIN_B + 4}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_HEIGHT - _MARGIN_B + 18}" font-size="11" '
            f'text-anchor="middle" font-family="sans-serif">{m}</text>'
        )
    for p in range(math.floor(y_lo), math.ceil(y_hi) + 1):
        if y_lo <= p <= y_hi:
            y = py(p)
            parts.append(
                f'<line x1="{_MARGIN_L - 4}" y1="{_fmt(y)}" x2="{_MARGIN_L}" '
                f'y2="{_fmt(y)}" stroke="black" stroke-width="1"/>'
            )
            parts.append(
                f'<text x="{_MARGIN_L - 8}" y="{_fmt(y + 4)}" font-size="11" '
                f'text-anchor="end" font-family="sans-serif">1e{p}</text>'
            )

    for idx, (learner, pts) in enumerate(series.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(
            f"{_fmt(px(math.log10(m)))},{_fmt(py(math.log10(float(e)))) }"
            for m, e in pts
            if e > 0
        )
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>'
        )
        ly = _MARGIN_T + 16 + 18 * idx
        lx = _WIDTH - _MARGIN_R + 12
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-size="12" font-family="sans-serif">{learner}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
