"""Structural proxy objectives over instantiated floorplan layouts.

The optimization case targets a simulated structural system; here the
simulator is replaced by two first-order surrogates that preserve the
qualitative landscape and are hand-checkable:

- stress: sum of squared beam lengths. Each wall edge carries a top and a
  bottom beam, and a uniformly loaded span's peak bending moment grows
  with the square of its length, so shorter, better-supported spans win.
- torsion: distance between the plan's mass centroid and its center of
  rigidity, with wall stiffness k = L^3 (cantilevered shear wall scaling).
  Symmetric plans score zero; walls bunched to one side score badly.

Both are pure functions of the layout, so many assignments can be
evaluated concurrently against one shared graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DegenerateLayoutError, ObjectiveError, ParamError
from .parametrizer import FloorplanLayout, ParametricGraph, instantiate

STIFFNESS_EXPONENT = 3.0


@dataclass(frozen=True)
class StructuralModel:
    """Columns at wall intersections, beam pairs per wall, wall panels."""

    columns: tuple[tuple[float, float], ...]
    beams: tuple[tuple[tuple[float, float], tuple[float, float], str], ...]
    wall_panels: tuple[tuple[tuple[float, float], tuple[float, float], float], ...]


@dataclass(frozen=True)
class ObjectiveVector:
    """Ordered objective values (minimization sense), or an infeasible flag."""

    labels: tuple[str, ...]
    values: tuple[float, ...] | None

    @property
    def feasible(self) -> bool:
        return self.values is not None

    @classmethod
    def infeasible(cls, labels: tuple[str, ...]) -> "ObjectiveVector":
        return cls(labels=labels, values=None)


def build_structural_model(layout: FloorplanLayout) -> StructuralModel:
    """One column per node; two beams (top, bottom) and one panel per wall."""
    columns = tuple(
        layout.node_positions[n] for n in sorted(layout.node_positions)
    )
    beams = []
    panels = []
    for eid in sorted(layout.edges):
        a, b, _ = layout.edges[eid]
        pa, pb = layout.node_positions[a], layout.node_positions[b]
        length = math.hypot(pb[0] - pa[0], pb[1] - pa[1])
        beams.append((pa, pb, "top"))
        beams.append((pa, pb, "bottom"))
        panels.append((pa, pb, length))
    return StructuralModel(
        columns=columns, beams=tuple(beams), wall_panels=tuple(panels)
    )


def stress_proxy(model: StructuralModel) -> float:
    """Sum of squared beam lengths (uniform-load bending-moment proxy)."""
    total = 0.0
    for pa, pb, _ in model.beams:
        total += (pb[0] - pa[0]) ** 2 + (pb[1] - pa[1]) ** 2
    return total


def torsion_proxy(
    model: StructuralModel, stiffness_exponent: float = STIFFNESS_EXPONENT
) -> float:
    """Distance between the mass centroid and the center of rigidity.

    The center of mass is the length-weighted centroid of panel midpoints.
    Per direction, the center of rigidity averages the midpoints of the
    panels that resist that direction (panels perpendicular to it), with
    stiffness k = L^exponent. A direction with no resisting panels falls
    back to the mass-center coordinate (zero eccentricity).
    """
    if not model.wall_panels:
        raise ParamError("structural model has no wall panels")
    total_len = 0.0
    cm_x = cm_y = 0.0
    kx_sum = ky_sum = 0.0
    crx_num = cry_num = 0.0
    for pa, pb, length in model.wall_panels:
        if length <= 0:
            continue
        mx, my = (pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0
        total_len += length
        cm_x += length * mx
        cm_y += length * my
        k = length**stiffness_exponent
        dx, dy = abs(pb[0] - pa[0]), abs(pb[1] - pa[1])
        if dy > dx:
            # y-parallel panel: resists x-direction load
            kx_sum += k
            crx_num += k * mx
        else:
            ky_sum += k
            cry_num += k * my
    if total_len <= 0:
        raise ParamError("structural model has zero total wall length")
    cm_x /= total_len
    cm_y /= total_len
    cr_x = crx_num / kx_sum if kx_sum > 0 else cm_x
    cr_y = cry_num / ky_sum if ky_sum > 0 else cm_y
    return math.hypot(cr_x - cm_x, cr_y - cm_y)


def area_deviation(model: StructuralModel, target: float) -> float:
    """|convex hull area of the columns - target|."""
    pts = sorted(set(model.columns))
    if len(pts) < 3:
        return abs(0.0 - target)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    area = 0.0
    for (x0, y0), (x1, y1) in zip(hull, hull[1:] + hull[:1]):
        area += x0 * y1 - x1 * y0
    return abs(abs(area) / 2.0 - target)


ObjectiveFn = Callable[[StructuralModel], float]


def build_registry(
    names: list[str], area_target: float | None = None
) -> dict[str, ObjectiveFn]:
    """Resolve objective names into evaluation functions."""
    registry: dict[str, ObjectiveFn] = {}
    for name in names:
        if name == "stress":
            registry[name] = stress_proxy
        elif name == "torsion":
            registry[name] = torsion_proxy
        elif name == "area_deviation":
            if area_target is None:
                raise ParamError("area_deviation objective needs a target area")
            registry[name] = lambda m, t=area_target: area_deviation(m, t)
        else:
            raise ParamError(f"unknown objective {name!r}")
    return registry


def evaluate_objectives(
    graph: ParametricGraph,
    variables: list,
    assignment: dict[int, float],
    registry: dict[str, ObjectiveFn],
) -> ObjectiveVector:
    """Instantiate the layout and evaluate every registered objective.

    Degenerate layouts yield an infeasible vector instead of values; the
    penalty policy belongs to the optimizer, not here.
    """
    if not registry:
        raise ParamError("objective registry is empty")
    labels = tuple(registry)
    try:
        layout = instantiate(graph, assignment, variables)
    except DegenerateLayoutError:
        return ObjectiveVector.infeasible(labels)
    model = build_structural_model(layout)
    values = []
    for label, fn in registry.items():
        try:
            values.append(float(fn(model)))
        except Exception as exc:
            raise ObjectiveError(label, exc) from exc
    return ObjectiveVector(labels=labels, values=tuple(values))
