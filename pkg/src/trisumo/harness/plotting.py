"""Training-curve rendering: metrics CSV -> one self-contained SVG.

Two stacked line charts: trailing-window win rate per episode, and the
window's mean steps-to-win. Episodes whose window holds no wins leave a gap
in the second chart rather than a fabricated zero.
"""

from __future__ import annotations

import math

from .metrics import MetricsRow, read_metrics

_W = 860
_PANEL_H = 280
_MARGIN_L = 70
_MARGIN_R = 25
_MARGIN_TOP = 40
_PANEL_GAP = 55
_MARGIN_BOT = 45

_AXIS = "#444444"
_GRID = "#dddddd"
_LINE = ("#1f6fb2", "#c05620")


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi] with a 1/2/5 step."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1.0, 2.0, 5.0, 10.0) if m * mag >= raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 else t)
        t += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if v != int(v) else str(int(v))


def _segments(
    points: list[tuple[float, float | None]]
) -> list[list[tuple[float, float]]]:
    """Split a series into runs of consecutive present values."""
    runs: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    for x, y in points:
        if y is None:
            if current:
                runs.append(current)
                current = []
        else:
            current.append((x, y))
    if current:
        runs.append(current)
    return runs


def _panel(
    out: list[str],
    top: float,
    title: str,
    y_label: str,
    points: list[tuple[float, float | None]],
    x_domain: tuple[float, float],
    y_domain: tuple[float, float],
    color: str,
) -> None:
    plot_w = _W - _MARGIN_L - _MARGIN_R
    plot_h = _PANEL_H
    x0, x1 = x_domain
    y0, y1 = y_domain
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0

    def px(x: float) -> float:
        return _MARGIN_L + (x - x0) / (x1 - x0) * plot_w

    def py(y: float) -> float:
        return top + plot_h - (y - y0) / (y1 - y0) * plot_h

    out.append(
        f'<text x="{_MARGIN_L}" y="{top - 12:.1f}" font-size="15" '
        f'fill="{_AXIS}" font-weight="bold">{title}</text>'
    )
    for t in _nice_ticks(y0, y1):
        y = py(t)
        out.append(
            f'<line x1="{_MARGIN_L}" y1="{y:.1f}" x2="{_MARGIN_L + plot_w}" '
            f'y2="{y:.1f}" stroke="{_GRID}" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" font-size="11" '
            f'fill="{_AXIS}" text-anchor="end">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(x0, x1, target=8):
        x = px(t)
        out.append(
            f'<line x1="{x:.1f}" y1="{top + plot_h}" x2="{x:.1f}" '
            f'y2="{top + plot_h + 5}" stroke="{_AXIS}" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.1f}" y="{top + plot_h + 18}" font-size="11" '
            f'fill="{_AXIS}" text-anchor="middle">{_fmt(t)}</text>'
        )
    # axis frame
    out.append(
        f'<path d="M {_MARGIN_L} {top} L {_MARGIN_L} {top + plot_h} '
        f'L {_MARGIN_L + plot_w} {top + plot_h}" fill="none" '
        f'stroke="{_AXIS}" stroke-width="1.5"/>'
    )
    out.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{top + plot_h + 36}" '
        f'font-size="12" fill="{_AXIS}" text-anchor="middle">episode</text>'
    )
    out.append(
        f'<text x="18" y="{top + plot_h / 2:.1f}" font-size="12" fill="{_AXIS}" '
        f'text-anchor="middle" transform="rotate(-90 18 {top + plot_h / 2:.1f})">'
        f"{y_label}</text>"
    )
    for run in _segments(points):
        if len(run) == 1:
            x, y = run[0]
            out.append(
                f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>'
            )
        else:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in run)
            out.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                f'stroke-width="1.8"/>'
            )


def render_metrics_svg(rows: list[MetricsRow]) -> str:
    """Two-panel training-curve SVG; valid XML even for an empty metrics file."""
    height = _MARGIN_TOP + 2 * _PANEL_H + _PANEL_GAP + _MARGIN_BOT
    episodes = [float(r.episode) for r in rows]
    x_domain = (0.0, max(episodes) if episodes else 1.0)

    win_points = [(float(r.episode), r.win_rate_window) for r in rows]
    steps_values = [
        r.mean_steps_to_win_window
        for r in rows
        if r.mean_steps_to_win_window is not None
    ]
    steps_points = [(float(r.episode), r.mean_steps_to_win_window) for r in rows]
    steps_hi = max(steps_values) * 1.05 if steps_values else 1.0

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{height}" '
        f'viewBox="0 0 {_W} {height}">',
        f'<rect x="0" y="0" width="{_W}" height="{height}" fill="white"/>',
    ]
    _panel(
        out,
        top=_MARGIN_TOP,
        title="Win rate (trailing window)",
        y_label="win rate",
        points=win_points,
        x_domain=x_domain,
        y_domain=(0.0, 1.0),
        color=_LINE[0],
    )
    _panel(
        out,
        top=_MARGIN_TOP + _PANEL_H + _PANEL_GAP,
        title="Steps to win (window mean over winning episodes)",
        y_label="steps to win",
        points=steps_points,
        x_domain=x_domain,
        y_domain=(0.0, steps_hi),
        color=_LINE[1],
    )
    out.append("</svg>")
    return "\n".join(out)


def plot_metrics(metrics_path: str, out_path: str) -> None:
    rows = read_metrics(metrics_path)
    svg = render_metrics_svg(rows)
    with open(out_path, "w", encoding="utf-8") as f:
        f.write(svg + "\n")
