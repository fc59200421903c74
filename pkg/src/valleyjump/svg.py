"""Static SVG heatmaps and line plots with no plotting dependency.

Colors come from a fixed 16-step ramp (viridis sampled at i/15); values map
linearly between the annotated min and max. Output depends only on the input
numbers, so identical CSVs render to identical bytes.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

RAMP = (
    "#440154", "#481a6c", "#472f7d", "#414487", "#39568c", "#31688e", "#2a788e", "#23888e",
    "#1f988b", "#22a884", "#35b779", "#54c568", "#7ad151", "#a5db36", "#d2e21b", "#fde725",
)
NAN_COLOR = "#bdbdbd"


def color_for(v: float, lo: float, hi: float) -> str:
    if not math.isfinite(v):
        return NAN_COLOR
    if hi <= lo:
        return RAMP[0]
    u = min(max((v - lo) / (hi - lo), 0.0), 1.0)
    return RAMP[min(int(u * len(RAMP)), len(RAMP) - 1)]


def _num(v: float) -> str:
    return f"{v:.3g}"


def heatmap(values: Sequence[Sequence[float]], row_labels: Sequence[float],
            col_labels: Sequence[float], title: str, row_name: str, col_name: str) -> str:
    """Rows are drawn bottom-up so the first row sits at the bottom."""
    n_rows, n_cols = len(values), len(values[0])
    cell, left, top = 48, 90, 50
    width = left + n_cols * cell + 130
    height = top + n_rows * cell + 70
    finite = [v for row in values for v in row if math.isfinite(v)]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{left}" y="24" font-size="14">{escape(title)}</text>',
    ]
    for i, row in enumerate(values):
        yy = top + (n_rows - 1 - i) * cell
        for j, v in enumerate(row):
            xx = left + j * cell
            out.append(f'<rect x="{xx}" y="{yy}" width="{cell}" height="{cell}" '
                       f'fill="{color_for(v, lo, hi)}"><title>{_num(v)}</title></rect>')
        out.append(f'<text x="{left - 6}" y="{yy + cell / 2 + 4}" text-anchor="end">'
                   f'{_num(row_labels[i])}</text>')
    base = top + n_rows * cell
    for j, c in enumerate(col_labels):
        out.append(f'<text x="{left + j * cell + cell / 2}" y="{base + 16}" '
                   f'text-anchor="middle">{_num(c)}</text>')
    out.append(f'<text x="{left + n_cols * cell / 2}" y="{base + 40}" '
               f'text-anchor="middle">{escape(col_name)}</text>')
    out.append(f'<text x="16" y="{top + n_rows * cell / 2}" '
               f'transform="rotate(-90 16 {top + n_rows * cell / 2})" '
               f'text-anchor="middle">{escape(row_name)}</text>')
    # color bar with explicit min/max
    bx = left + n_cols * cell + 30
    step = n_rows * cell / len(RAMP)
    for k, col in enumerate(RAMP):
        out.append(f'<rect x="{bx}" y="{top + (len(RAMP) - 1 - k) * step:.2f}" width="16" '
                   f'height="{step:.2f}" fill="{col}"/>')
    out.append(f'<text x="{bx + 22}" y="{top + 10}">max {_num(hi)}</text>')
    out.append(f'<text x="{bx + 22}" y="{base}">min {_num(lo)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_plot(series: dict[str, tuple[Sequence[float], Sequence[float]]], title: str,
              x_name: str, y_name: str, log_x: bool = False) -> str:
    width, height, left, top, pw, ph = 560, 380, 70, 40, 380, 280
    xs_all = [x for xs, _ in series.values() for x in xs if math.isfinite(x) and (x > 0 or not log_x)]
    ys_all = [y for _, ys in series.values() for y in ys if math.isfinite(y)]
    if not xs_all or not ys_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]

    def tx(v):
        return math.log10(v) if log_x else v

    x_lo, x_hi = tx(min(xs_all)), tx(max(xs_all))
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def px(x):
        return left + (tx(x) - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return top + ph - (y - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<text x="{left}" y="24" font-size="14">{escape(title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{left}" y="{top + ph + 16}">{_num(min(xs_all))}</text>',
        f'<text x="{left + pw}" y="{top + ph + 16}" text-anchor="end">{_num(max(xs_all))}</text>',
        f'<text x="{left + pw / 2}" y="{top + ph + 34}" text-anchor="middle">{escape(x_name)}</text>',
        f'<text x="{left - 6}" y="{top + ph}" text-anchor="end">{_num(y_lo)}</text>',
        f'<text x="{left - 6}" y="{top + 10}" text-anchor="end">{_num(y_hi)}</text>',
        f'<text x="16" y="{top + ph / 2}" transform="rotate(-90 16 {top + ph / 2})" '
        f'text-anchor="middle">{escape(y_name)}</text>',
    ]
    for k, (name, (xs, ys)) in enumerate(series.items()):
        col = RAMP[(k * 5) % len(RAMP)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys)
                       if math.isfinite(x) and math.isfinite(y) and (x > 0 or not log_x))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        out.append(f'<text x="{left + pw + 10}" y="{top + 14 + 16 * k}" fill="{col}">'
                   f'{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
