"""SVG scatter overlay: key points, their mirror images, and the midline.

Text output with fixed number formatting, so overlays serve as diffable
goldens alongside the CSV reports.
"""

from __future__ import annotations

from .face import MIDLINE_IDS, FaceFrame
from .formatting import fmt
from .symmetry import MidlineAxis, reflect_about

__all__ = ["render_overlay"]

_REGION_FILL = {
    "eyebrow": "#2b6cb0",
    "eye": "#2f855a",
    "lip_corner": "#c05621",
    "lip_middle": "#6b46c1",
}

_PAD_FRACTION = 0.15
_MIN_PAD = 10.0


def render_overlay(frame: FaceFrame, axis: MidlineAxis) -> str:
    """One self-contained SVG: filled circles for measured points, hollow
    circles for their reflections about the axis, and the axis line."""
    xs = [p.x for p in frame.points if p.present]
    ys = [p.y for p in frame.points if p.present]
    if not xs:
        xs, ys = [axis.point[0]], [axis.point[1]]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    pad = max(_MIN_PAD, _PAD_FRACTION * max(x1 - x0, y1 - y0))
    vx, vy = x0 - pad, y0 - pad
    vw, vh = (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad

    # axis segment long enough to cross the whole view box
    span = vw + vh
    ax, ay = axis.point
    dx, dy = axis.direction
    x_start, y_start = ax - span * dx, ay - span * dy
    x_end, y_end = ax + span * dx, ay + span * dy

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{fmt(vx)} {fmt(vy)} {fmt(vw)} {fmt(vh)}">',
        f'<line x1="{fmt(x_start)}" y1="{fmt(y_start)}" '
        f'x2="{fmt(x_end)}" y2="{fmt(y_end)}" '
        'stroke="#718096" stroke-width="0.8" stroke-dasharray="4 2"/>',
    ]
    for p in frame.points:
        if not p.present:
            continue
        fill = _REGION_FILL[p.region.value]
        parts.append(
            f'<circle cx="{fmt(p.x)}" cy="{fmt(p.y)}" r="2" fill="{fill}">'
            f"<title>{p.point_id}</title></circle>"
        )
    for p in frame.points:
        if not p.present or p.point_id in MIDLINE_IDS:
            continue
        mx, my = reflect_about(axis, (p.x, p.y))
        parts.append(
            f'<circle cx="{fmt(mx)}" cy="{fmt(my)}" r="2" fill="none" '
            f'stroke="{_REGION_FILL[p.region.value]}" stroke-width="0.6">'
            f"<title>{p.point_id}&#8217;</title></circle>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
