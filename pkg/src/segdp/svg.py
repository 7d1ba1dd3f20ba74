"""Hand-rolled SVG emission for the grid-search scatter and rug chart.

The chart puts the assignment cost on the y axis and n_grid on the x
axis, colors points by c_grid, draws one rug tick per grid point along the
cost axis and re-draws the ticks of the selected cost region in red. SVG
is generated as plain text with fixed float formatting so the output is
byte-stable and diffable.
"""

from __future__ import annotations

import math

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
)

_WIDTH, _HEIGHT = 720, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 90, 150, 30, 60


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(low: float, high: float, count: int = 5):
    if high == low:
        return [low]
    step = (high - low) / (count - 1)
    return [low + i * step for i in range(count)]


def scatter_rug_svg(points, region=None, region_costs=()) -> str:
    """Render grid points as an SVG string.

    ``points`` is a sequence of (n_grid, c_grid, cost) triples with finite
    costs; ``region`` is an optional (low, high) cost interval and
    ``region_costs`` the costs whose rug ticks are drawn in red.
    """
    points = [(int(n), int(c), float(v)) for n, c, v in points if math.isfinite(v)]
    if not points:
        raise ValueError("nothing to plot: no finite grid-point costs")
    xs = [p[0] for p in points]
    cs = [p[1] for p in points]
    ys = [p[2] for p in points]
    x_low, x_high = min(xs), max(xs)
    y_low, y_high = min(ys), max(ys)
    y_pad = (y_high - y_low) * 0.05 or max(abs(y_high), 1.0) * 0.05
    y_low -= y_pad
    y_high += y_pad
    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def sx(n):
        if x_high == x_low:
            return _LEFT + plot_w / 2
        return _LEFT + (n - x_low) / (x_high - x_low) * plot_w

    def sy(v):
        return _TOP + (y_high - v) / (y_high - y_low) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_HEIGHT - _BOTTOM}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_LEFT}" y1="{_HEIGHT - _BOTTOM}" x2="{_WIDTH - _RIGHT}" '
        f'y2="{_HEIGHT - _BOTTOM}" stroke="black" stroke-width="1"/>',
    ]

    for value in _ticks(y_low, y_high):
        y = sy(value)
        out.append(
            f'<line x1="{_LEFT - 4}" y1="{_fmt(y)}" x2="{_LEFT}" y2="{_fmt(y)}" '
            'stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-size="11" font-family="sans-serif">{value:.4g}</text>'
        )
    for n in sorted(set(xs)):
        x = sx(n)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{_HEIGHT - _BOTTOM}" x2="{_fmt(x)}" '
            f'y2="{_HEIGHT - _BOTTOM + 4}" stroke="black" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{_HEIGHT - _BOTTOM + 18}" text-anchor="middle" '
            f'font-size="11" font-family="sans-serif">{n}</text>'
        )
    out.append(
        f'<text x="{_LEFT + plot_w / 2:.2f}" y="{_HEIGHT - 14}" text-anchor="middle" '
        'font-size="13" font-family="sans-serif">max transitions (n_grid)</text>'
    )
    out.append(
        f'<text x="22" y="{_TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif" '
        f'transform="rotate(-90 22 {_TOP + plot_h / 2:.2f})">total cost</text>'
    )

    # rug: one blue tick per point on the cost axis, red for the region
    for value in ys:
        y = sy(value)
        out.append(
            f'<line x1="{_LEFT - 30}" y1="{_fmt(y)}" x2="{_LEFT - 14}" y2="{_fmt(y)}" '
            'stroke="#1f77b4" stroke-width="1"/>'
        )
    for value in region_costs:
        if not math.isfinite(value):
            continue
        y = sy(float(value))
        out.append(
            f'<line x1="{_LEFT - 34}" y1="{_fmt(y)}" x2="{_LEFT - 12}" y2="{_fmt(y)}" '
            'stroke="red" stroke-width="2"/>'
        )
    if region is not None:
        for bound in region:
            y = sy(float(bound))
            out.append(
                f'<line x1="{_LEFT - 36}" y1="{_fmt(y)}" x2="{_LEFT - 10}" y2="{_fmt(y)}" '
                'stroke="red" stroke-width="1" stroke-dasharray="2,2"/>'
            )

    for n, c, value in points:
        out.append(
            f'<circle cx="{_fmt(sx(n))}" cy="{_fmt(sy(value))}" r="4" '
            f'fill="{_PALETTE[(c - 1) % len(_PALETTE)]}" fill-opacity="0.85"/>'
        )

    legend_x = _WIDTH - _RIGHT + 16
    out.append(
        f'<text x="{legend_x}" y="{_TOP + 8}" font-size="12" '
        'font-family="sans-serif">c_grid</text>'
    )
    for i, c in enumerate(sorted(set(cs))):
        y = _TOP + 24 + i * 18
        out.append(
            f'<rect x="{legend_x}" y="{y - 9}" width="10" height="10" '
            f'fill="{_PALETTE[(c - 1) % len(_PALETTE)]}"/>'
        )
        out.append(
            f'<text x="{legend_x + 16}" y="{y}" font-size="11" '
            f'font-family="sans-serif">{c}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
