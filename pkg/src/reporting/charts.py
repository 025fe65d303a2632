"""Static SVG charts and optional interactive plotly pages."""

import logging
from typing import Dict, Sequence
from xml.sax.saxutils import escape

import plotly.graph_objects as go

logger = logging.getLogger(__name__)

WIDTH = 800
HEIGHT = 500
MARGIN = {"left": 80, "right": 30, "top": 50, "bottom": 120}
PALETTE = ("#2E86AB", "#F18F01", "#C73E1D", "#3B1F2B", "#6A994E", "#7B2CBF")


def _frame(title: str) -> list:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-family="sans-serif" '
        f'font-size="18">{escape(title)}</text>',
    ]


def _plot_area():
    x0 = MARGIN["left"]
    y0 = MARGIN["top"]
    return x0, y0, WIDTH - MARGIN["right"] - x0, HEIGHT - MARGIN["bottom"] - y0


def _axis_range(values: Sequence[float]):
    low = min(0.0, min(values))
    high = max(0.0, max(values))
    if high == low:
        high = low + 1.0
    return low, high


def _y_axis(lines: list, low: float, high: float, y_label: str) -> None:
    x0, y0, w, h = _plot_area()
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y0 + h}" stroke="black"/>')
    for k in range(5):
        value = low + (high - low) * k / 4
        y = y0 + h - h * k / 4
        lines.append(f'<line x1="{x0 - 5}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>')
        lines.append(
            f'<text x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{value:.3g}</text>'
        )
    if y_label:
        lines.append(
            f'<text x="18" y="{y0 + h / 2:.1f}" transform="rotate(-90 18 {y0 + h / 2:.1f})" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">{escape(y_label)}</text>'
        )


def svg_bar_chart(labels: Sequence[str], values: Sequence[float], title: str, y_label: str = "") -> str:
    values = [float(v) for v in values]
    x0, y0, w, h = _plot_area()
    low, high = _axis_range(values)
    lines = _frame(title)
    _y_axis(lines, low, high, y_label)

    def y_of(v: float) -> float:
        return y0 + h - h * (v - low) / (high - low)

    baseline = y_of(0.0)
    lines.append(f'<line x1="{x0}" y1="{baseline:.1f}" x2="{x0 + w}" y2="{baseline:.1f}" stroke="black"/>')
    slot = w / max(len(values), 1)
    for i, (label, value) in enumerate(zip(labels, values)):
        top = min(y_of(value), baseline)
        height = abs(baseline - y_of(value))
        x = x0 + i * slot + slot * 0.15
        cx = x0 + (i + 0.5) * slot
        lines.append(
            f'<rect x="{x:.1f}" y="{top:.1f}" width="{slot * 0.7:.1f}" height="{height:.1f}" '
            f'fill="{PALETTE[0]}"/>'
        )
        lines.append(
            f'<text x="{cx:.1f}" y="{y0 + h + 14}" transform="rotate(40 {cx:.1f} {y0 + h + 14})" '
            f'font-family="sans-serif" font-size="11">{escape(str(label))}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines)


def svg_line_chart(x: Sequence[float], series: Dict[str, Sequence[float]], title: str,
                   y_label: str = "") -> str:
    x = [float(v) for v in x]
    everything = [float(v) for values in series.values() for v in values]
    x0, y0, w, h = _plot_area()
    low, high = min(everything), max(everything)
    if high == low:
        high = low + 1.0
    x_low, x_high = min(x), max(x)
    if x_high == x_low:
        x_high = x_low + 1.0
    lines = _frame(title)
    _y_axis(lines, low, high, y_label)
    lines.append(f'<line x1="{x0}" y1="{y0 + h}" x2="{x0 + w}" y2="{y0 + h}" stroke="black"/>')
    for xv in x:
        px = x0 + w * (xv - x_low) / (x_high - x_low)
        lines.append(
            f'<text x="{px:.1f}" y="{y0 + h + 16}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{xv:g}</text>'
        )
    for k, (name, values) in enumerate(series.items()):
        colour = PALETTE[k % len(PALETTE)]
        points = " ".join(
            f"{x0 + w * (xv - x_low) / (x_high - x_low):.1f},{y0 + h - h * (float(v) - low) / (high - low):.1f}"
            for xv, v in zip(x, values)
        )
        lines.append(f'<polyline points="{points}" fill="none" stroke="{colour}" stroke-width="2"/>')
        lines.append(
            f'<text x="{x0 + 10}" y="{y0 + h + 50 + 16 * k}" fill="{colour}" font-family="sans-serif" '
            f'font-size="12">{escape(name)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines)


def html_bar_chart(labels: Sequence[str], values: Sequence[float], title: str, div_id: str) -> str:
    fig = go.Figure(go.Bar(x=list(labels), y=[float(v) for v in values], marker_color=PALETTE[0]))
    fig.update_layout(title=title, template="plotly_white", height=HEIGHT, width=WIDTH)
    return fig.to_html(include_plotlyjs="cdn", full_html=True, div_id=div_id)


def html_line_chart(x: Sequence[float], series: Dict[str, Sequence[float]], title: str, div_id: str) -> str:
    fig = go.Figure()
    for name, values in series.items():
        fig.add_trace(go.Scatter(x=list(x), y=[float(v) for v in values], mode="lines+markers", name=name))
    fig.update_layout(title=title, template="plotly_white", height=HEIGHT, width=WIDTH)
    return fig.to_html(include_plotlyjs="cdn", full_html=True, div_id=div_id)
