"""I-shaped annotation marks: detection, separation, and variable binding.

An I-mark is a long stem with a short perpendicular cap crossing each end
(like a dimension tick). Marks coexist with layout strokes in one sketch;
they are recognized from the vectorized segments, removed from the layout,
and each bound to the nearest wall axis whose normal runs along the stem.
The stem length sets the translation range, centered on the drawn
position: a wall annotated with a mark of length L may slide +/- L/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .parametrizer import ParametricGraph
from .vectorizer import LineSegment, VectorScene

CAP_PERP_TOL = math.radians(15.0)
CAP_ATTACH_TOL = 3.0
CAP_LENGTH_RATIO = 0.5
DEFAULT_SEARCH_RADIUS = 40.0


@dataclass(frozen=True)
class AnnotationMark:
    """One I-shaped mark: a stem segment plus its two end caps."""

    stem_p0: tuple[float, float]
    stem_p1: tuple[float, float]
    caps: tuple[LineSegment, LineSegment]

    @property
    def length(self) -> float:
        return math.hypot(
            self.stem_p1[0] - self.stem_p0[0], self.stem_p1[1] - self.stem_p0[1]
        )

    @property
    def center(self) -> tuple[float, float]:
        return (
            (self.stem_p0[0] + self.stem_p1[0]) / 2.0,
            (self.stem_p0[1] + self.stem_p1[1]) / 2.0,
        )

    @property
    def direction(self) -> tuple[float, float]:
        L = self.length
        return (
            (self.stem_p1[0] - self.stem_p0[0]) / L,
            (self.stem_p1[1] - self.stem_p0[1]) / L,
        )


@dataclass(frozen=True)
class DesignVariable:
    """A bounded translation of one wall axis along its normal.

    Zero means "as drawn"; the range width equals the mark's stem length.
    """

    id: int
    axis_id: int
    lo: float
    hi: float
    source_mark: AnnotationMark | None = None

    def __post_init__(self):
        if not self.lo < 0.0 < self.hi:
            raise ValueError(f"range [{self.lo}, {self.hi}] must bracket 0")


def _angle_between(d1: tuple[float, float], d2: tuple[float, float]) -> float:
    """Unsigned angle between two undirected directions, in [0, pi/2]."""
    dot = abs(d1[0] * d2[0] + d1[1] * d2[1])
    return math.acos(min(1.0, dot))


def _point_segment_distance(
    p: tuple[float, float], seg: LineSegment
) -> float:
    dx, dy = seg.p1[0] - seg.p0[0], seg.p1[1] - seg.p0[1]
    L2 = dx * dx + dy * dy
    t = ((p[0] - seg.p0[0]) * dx + (p[1] - seg.p0[1]) * dy) / L2
    t = min(1.0, max(0.0, t))
    qx, qy = seg.p0[0] + t * dx, seg.p0[1] + t * dy
    return math.hypot(p[0] - qx, p[1] - qy)


def _cap_matches(stem: LineSegment, end: tuple[float, float], cap: LineSegment) -> bool:
    """A cap crosses a stem end near the cap's own midpoint.

    Requiring the STEM END near the CAP MIDPOINT (not merely near the cap)
    distinguishes I-marks from room corners, where a perpendicular wall
    attaches at its own endpoint instead.
    """
    if cap.length >= CAP_LENGTH_RATIO * stem.length:
        return False
    if _angle_between(stem.direction, cap.direction) < math.pi / 2 - CAP_PERP_TOL:
        return False
    mx, my = cap.midpoint
    return math.hypot(end[0] - mx, end[1] - my) <= CAP_ATTACH_TOL


def _find_triples(
    segments: tuple[LineSegment, ...]
) -> list[tuple[int, int, int]]:
    """Greedy I-pattern matching: (stem, cap0, cap1) index triples.

    Stems are considered in descending length order; each segment joins at
    most one mark, so a longer stem wins a contested cap.
    """
    order = sorted(
        range(len(segments)), key=lambda i: (-segments[i].length, i)
    )
    used: set[int] = set()
    triples = []
    for si in order:
        if si in used:
            continue
        stem = segments[si]
        found = []
        for end in (stem.p0, stem.p1):
            best = None
            best_d = math.inf
            for ci in order:
                if ci == si or ci in used or ci in found:
                    continue
                cap = segments[ci]
                if not _cap_matches(stem, end, cap):
                    continue
                d = _point_segment_distance(end, cap)
                if d < best_d:
                    best, best_d = ci, d
            if best is None:
                break
            found.append(best)
        if len(found) == 2:
            used.update((si, found[0], found[1]))
            triples.append((si, found[0], found[1]))
    return triples


def split_annotation_strokes(
    scene: VectorScene,
) -> tuple[VectorScene, VectorScene]:
    """Separate I-mark strokes from layout strokes.

    Returns (layout, marks_raw). Segments forming I-patterns move to
    marks_raw; everything else stays in the layout scene.
    """
    triples = _find_triples(scene.segments)
    mark_indices = {i for triple in triples for i in triple}
    layout = tuple(
        seg for i, seg in enumerate(scene.segments) if i not in mark_indices
    )
    marks = tuple(
        seg for i, seg in enumerate(scene.segments) if i in mark_indices
    )
    mk = lambda segs: VectorScene(
        segments=segs,
        image_size=scene.image_size,
        luminosity_range=scene.luminosity_range,
        provenance=scene.provenance,
    )
    return mk(layout), mk(marks)


def detect_annotations(
    marks_raw: VectorScene,
) -> tuple[list[AnnotationMark], list[str]]:
    """Group mark strokes into AnnotationMark objects.

    Stems missing a cap or failing the I-pattern invariants are dropped
    with a warning record.
    """
    segments = marks_raw.segments
    triples = _find_triples(segments)
    matched = {i for triple in triples for i in triple}
    marks = []
    warnings = []
    for si, c0, c1 in triples:
        stem = segments[si]
        marks.append(
            AnnotationMark(
                stem_p0=stem.p0,
                stem_p1=stem.p1,
                caps=(segments[c0], segments[c1]),
            )
        )
    for i, seg in enumerate(segments):
        if i not in matched:
            warnings.append(
                f"stroke ({seg.p0[0]:.1f},{seg.p0[1]:.1f})-"
                f"({seg.p1[0]:.1f},{seg.p1[1]:.1f}) does not complete an "
                f"I-pattern; discarded"
            )
    marks.sort(key=lambda m: (m.center[1], m.center[0]))
    return marks, warnings


def _axis_distance(graph: ParametricGraph, axis_id: int, p: tuple[float, float]) -> float:
    """Distance from a point to the axis's node-span segment."""
    axis = graph.axes[axis_id]
    first = graph.nodes[axis.node_ids[0]]
    last = graph.nodes[axis.node_ids[-1]]
    dx, dy = last[0] - first[0], last[1] - first[1]
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return math.hypot(p[0] - first[0], p[1] - first[1])
    t = ((p[0] - first[0]) * dx + (p[1] - first[1]) * dy) / L2
    t = min(1.0, max(0.0, t))
    qx, qy = first[0] + t * dx, first[1] + t * dy
    return math.hypot(p[0] - qx, p[1] - qy)


def bind_annotations(
    graph: ParametricGraph,
    marks: list[AnnotationMark],
    search_radius: float = DEFAULT_SEARCH_RADIUS,
) -> tuple[list[DesignVariable], list[str]]:
    """Bind each mark to the nearest eligible wall axis as a variable.

    Eligible axes have their normal parallel to the mark's stem within 15
    degrees and lie within search_radius of the mark center. Each axis
    carries at most one variable; when two marks contend, the closer one
    wins and the loser falls back to its next-nearest eligible axis.
    Unbound marks are reported as warnings, never errors.
    """
    if search_radius <= 0:
        raise ValueError(f"search_radius must be positive, got {search_radius}")
    candidates = []
    for mi, mark in enumerate(marks):
        for axis_id, axis in graph.axes.items():
            if _angle_between(mark.direction, axis.normal) > CAP_PERP_TOL:
                continue
            d = _axis_distance(graph, axis_id, mark.center)
            if d <= search_radius:
                candidates.append((d, mi, axis_id))
    candidates.sort()
    bound_axes: set[int] = set()
    bound_marks: set[int] = set()
    assignments: list[tuple[int, int]] = []
    for d, mi, axis_id in candidates:
        if mi in bound_marks or axis_id in bound_axes:
            continue
        bound_marks.add(mi)
        bound_axes.add(axis_id)
        assignments.append((mi, axis_id))
    assignments.sort()
    variables = []
    for var_id, (mi, axis_id) in enumerate(assignments):
        mark = marks[mi]
        half = mark.length / 2.0
        variables.append(
            DesignVariable(
                id=var_id, axis_id=axis_id, lo=-half, hi=half, source_mark=mark
            )
        )
    warnings = []
    for mi, mark in enumerate(marks):
        if mi not in bound_marks:
            warnings.append(
                f"mark at ({mark.center[0]:.1f},{mark.center[1]:.1f}) has no "
                f"eligible axis within {search_radius:.0f} px; unbound"
            )
    return variables, warnings
