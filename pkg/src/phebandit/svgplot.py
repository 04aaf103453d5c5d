"""Minimal self-contained SVG line charts.

The CSVs are the machine-readable contract; these charts are the human
companion.  Rendering is a pure function of the data (no timestamps, no
randomness), so repeated runs emit identical files.  Long series are
thinned to a fixed point budget before drawing; thinning always keeps the
first and last points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple
from xml.sax.saxutils import escape

__all__ = ["Series", "render_line_chart", "PALETTE"]

# distinguishable line colors, reused cyclically past the eighth series
PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)

MAX_POINTS_PER_SERIES = 512


@dataclass(frozen=True)
class Series:
    """One polyline: equal-length x and y value sequences."""

    label: str
    xs: Sequence[float]
    ys: Sequence[float]

    def __post_init__(self) -> None:
        if len(self.xs) != len(self.ys):
            raise ValueError(
                f"series {self.label!r} has {len(self.xs)} x values "
                f"but {len(self.ys)} y values"
            )
        if not self.xs:
            raise ValueError(f"series {self.label!r} is empty")


def _thin(values: Sequence[float], stride: int) -> List[float]:
    kept = list(values[::stride])
    if (len(values) - 1) % stride != 0:
        kept.append(values[-1])
    return kept


def _tick_values(low: float, high: float, target: int = 5) -> List[float]:
    """Round tick positions covering [low, high] at a 1/2/5 step."""
    span = high - low
    if span <= 0.0:
        return [low]
    raw = span / target
    magnitude = 10.0 ** math.floor(math.log10(raw))
    for factor in (1.0, 2.0, 5.0, 10.0):
        step = factor * magnitude
        if step >= raw:
            break
    first = math.ceil(low / step) * step
    ticks = []
    value = first
    while value <= high + 1e-9 * span:
        ticks.append(0.0 if abs(value) < 1e-12 * span else value)
        value += step
    return ticks


def _fmt_tick(value: float) -> str:
    return f"{value:g}"


def render_line_chart(
    series: Sequence[Series],
    title: str,
    x_label: str,
    y_label: str,
    width: int = 760,
    height: int = 480,
) -> str:
    """Render series as an SVG document string."""
    if not series:
        raise ValueError("need at least one series")

    left, right, top, bottom = 70, 24, 44, 56
    plot_w = width - left - right
    plot_h = height - top - bottom

    x_min = min(min(s.xs) for s in series)
    x_max = max(max(s.xs) for s in series)
    y_min = 0.0
    y_top = max(max(s.ys) for s in series)
    y_max = y_top * 1.05 if y_top > 0.0 else 1.0
    if x_max <= x_min:
        x_max = x_min + 1.0

    def sx(x: float) -> float:
        return left + (x - x_min) / (x_max - x_min) * plot_w

    def sy(y: float) -> float:
        return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h

    parts: List[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">'
    )
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    parts.append(
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="16">'
        f"{escape(title)}</text>"
    )

    # gridlines and ticks
    for tick in _tick_values(y_min, y_max):
        y = sy(tick)
        parts.append(
            f'<line x1="{left}" y1="{y:.2f}" x2="{left + plot_w}" y2="{y:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11">'
            f"{_fmt_tick(tick)}</text>"
        )
    for tick in _tick_values(x_min, x_max):
        x = sx(tick)
        parts.append(
            f'<line x1="{x:.2f}" y1="{top + plot_h}" x2="{x:.2f}" '
            f'y2="{top + plot_h + 5}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{top + plot_h + 20}" text-anchor="middle" '
            f'font-size="11">{_fmt_tick(tick)}</text>'
        )

    # axes
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" '
        f'stroke="#333333" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" '
        f'y2="{top + plot_h}" stroke="#333333" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 14}" text-anchor="middle" '
        f'font-size="13">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="20" y="{top + plot_h / 2:.1f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 20 {top + plot_h / 2:.1f})">{escape(y_label)}</text>'
    )

    # series polylines
    for index, item in enumerate(series):
        stride = max(1, math.ceil(len(item.xs) / MAX_POINTS_PER_SERIES))
        xs = _thin(item.xs, stride)
        ys = _thin(item.ys, stride)
        color = PALETTE[index % len(PALETTE)]
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.8" '
            f'points="{points}"/>'
        )

    # legend, top-left inside the plot area
    legend_x = left + 12
    legend_y = top + 10
    for index, item in enumerate(series):
        color = PALETTE[index % len(PALETTE)]
        y = legend_y + 16 * index
        parts.append(
            f'<line x1="{legend_x}" y1="{y:.1f}" x2="{legend_x + 22}" y2="{y:.1f}" '
            f'stroke="{color}" stroke-width="2.5"/>'
        )
        parts.append(
            f'<text x="{legend_x + 28}" y="{y + 4:.1f}" font-size="12">'
            f"{escape(item.label)}</text>"
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def series_from_curves(
    labels: Sequence[str], curves: Sequence[Sequence[float]]
) -> Tuple[Series, ...]:
    """Pair labels with per-round curves, x running 1..len(curve)."""
    if len(labels) != len(curves):
        raise ValueError("labels and curves must align")
    return tuple(
        Series(label, range(1, len(curve) + 1), curve)
        for label, curve in zip(labels, curves)
    )
