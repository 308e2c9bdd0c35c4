"""SVG rendering of instantiated floorplan layouts.

Output is SVG 1.1. Sketch coordinates are y-down; the rendered SVG flips
to y-up (architectural convention) via a group transform, so a wall at
sketch y=0 appears at the bottom of the drawing.
"""

from __future__ import annotations

import math
from pathlib import Path

from .model import ParametricModel
from .parametrizer import FloorplanLayout

WALL_STROKE = 2.0
COLUMN_RADIUS = 3.0


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_layout_svg(
    layout: FloorplanLayout,
    model: ParametricModel | None = None,
    size: tuple[float, float] | None = None,
    margin: float = 10.0,
) -> str:
    """Render wall polylines, columns, and annotation ranges as SVG text."""
    xs = [p[0] for p in layout.node_positions.values()]
    ys = [p[1] for p in layout.node_positions.values()]
    if size is not None:
        width, height = size
        min_x = min_y = 0.0
    else:
        min_x, min_y = min(xs) - margin, min(ys) - margin
        width = max(xs) - min_x + margin
        height = max(ys) - min_y + margin

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width)}" height="{_fmt(height)}" '
        f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">',
        # Flip to y-up: sketch y grows downward, drawing y grows upward.
        f'<g transform="translate({_fmt(-min_x)},{_fmt(height + min_y)}) scale(1,-1)">',
    ]
    for polyline in layout.polylines:
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in polyline)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="black" '
            f'stroke-width="{_fmt(WALL_STROKE)}" stroke-linecap="round"/>'
        )
    for nid in sorted(layout.node_positions):
        x, y = layout.node_positions[nid]
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(COLUMN_RADIUS)}" '
            f'fill="white" stroke="black" stroke-width="1"/>'
        )
    if model is not None:
        for var in sorted(model.variables, key=lambda v: v.id):
            parts.extend(_range_arrow(var, model, layout))
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _range_arrow(var, model: ParametricModel, layout: FloorplanLayout) -> list[str]:
    """Dashed double-headed arrow spanning a variable's translation range."""
    axis = model.graph.axes.get(var.axis_id)
    if axis is None:
        return []
    node_pts = [
        layout.node_positions[n]
        for n in axis.node_ids
        if n in layout.node_positions
    ]
    if not node_pts:
        return []
    mx = sum(p[0] for p in node_pts) / len(node_pts)
    my = sum(p[1] for p in node_pts) / len(node_pts)
    nx_, ny_ = axis.normal
    x0, y0 = mx + var.lo * nx_, my + var.lo * ny_
    x1, y1 = mx + var.hi * nx_, my + var.hi * ny_
    out = [
        f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
        f'stroke="crimson" stroke-width="1" stroke-dasharray="4 3"/>'
    ]
    for tip, back in (((x0, y0), (x1, y1)), ((x1, y1), (x0, y0))):
        ang = math.atan2(back[1] - tip[1], back[0] - tip[0])
        for spread in (0.5, -0.5):
            bx = tip[0] + 6 * math.cos(ang + spread)
            by = tip[1] + 6 * math.sin(ang + spread)
            out.append(
                f'<line x1="{_fmt(tip[0])}" y1="{_fmt(tip[1])}" '
                f'x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                f'stroke="crimson" stroke-width="1"/>'
            )
    return out


def write_layout_svg(
    path: str | Path,
    layout: FloorplanLayout,
    model: ParametricModel | None = None,
    size: tuple[float, float] | None = None,
) -> None:
    Path(path).write_text(render_layout_svg(layout, model, size=size))
