"""Vector scenes to constrained parametric graphs.

Segment endpoints snap into shared nodes, crossings split edges, collinear
connected edges merge into wall axes, and axes translate rigidly along
their normals. Translations move every node of an axis together, dragging
incident edges with them, so the layout never tears open: this is the
constraint model that turns a sketch into a parametric floorplan.

Graphs are treated as immutable values; every operation returns a new
graph and leaves its input untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    DegenerateLayoutError,
    EmptySceneError,
    NotFoundError,
    ParamError,
    RangeError,
)
from .vectorizer import VectorScene

DEFAULT_SNAP_TOL = 4.0
DEFAULT_ANGLE_TOL = math.radians(5.0)
DEFAULT_COLLINEAR_TOL = 2.0


@dataclass(frozen=True)
class WallAxis:
    """A maximal chain of connected collinear wall edges."""

    id: int
    direction: tuple[float, float]  # unit, leading nonzero component > 0
    anchor: tuple[float, float]  # point on the axis line
    node_ids: tuple[int, ...]  # ordered by projection onto direction
    edge_ids: tuple[int, ...]

    @property
    def normal(self) -> tuple[float, float]:
        """Direction rotated +90 degrees; translation axis of the wall."""
        return (-self.direction[1], self.direction[0])


@dataclass(frozen=True)
class ParametricGraph:
    """Nodes, wall edges, collinear axes, and grouping of a floorplan."""

    nodes: dict[int, tuple[float, float]]
    edges: dict[int, tuple[int, int, str]]  # (node_a, node_b, element_kind)
    axes: dict[int, WallAxis] = field(default_factory=dict)
    groups: dict[int, tuple[str, tuple[int, ...]]] = field(default_factory=dict)
    snap_tol: float = DEFAULT_SNAP_TOL

    @property
    def base_assignment(self) -> dict[int, float]:
        """Default variable values: everything at the drawn position."""
        return {}

    def edge_vector(self, edge_id: int) -> tuple[float, float]:
        a, b, _ = self.edges[edge_id]
        ax, ay = self.nodes[a]
        bx, by = self.nodes[b]
        return (bx - ax, by - ay)

    def adjacency(self) -> frozenset[tuple[int, int]]:
        """Edge adjacency relation: the set of connected node pairs."""
        pairs = set()
        for a, b, _ in self.edges.values():
            pairs.add((min(a, b), max(a, b)))
        return frozenset(pairs)

    def validate(self) -> None:
        for eid, (a, b, _) in self.edges.items():
            if a == b:
                raise ParamError(f"edge {eid} references a single node")
            if a not in self.nodes or b not in self.nodes:
                raise ParamError(f"edge {eid} references a missing node")
        used = {n for a, b, _ in self.edges.values() for n in (a, b)}
        orphans = set(self.nodes) - used
        if orphans:
            raise ParamError(f"orphan nodes: {sorted(orphans)}")
        if self.axes:
            covered: list[int] = []
            for axis in self.axes.values():
                covered.extend(axis.edge_ids)
            if sorted(covered) != sorted(self.edges):
                raise ParamError("axes do not partition the edge set")


@dataclass(frozen=True)
class FloorplanLayout:
    """Concrete geometry instantiated from a graph plus an assignment."""

    polylines: tuple[tuple[tuple[float, float], ...], ...]
    node_positions: dict[int, tuple[float, float]]
    edges: dict[int, tuple[int, int, str]]

    def wall_lengths(self) -> list[float]:
        out = []
        for a, b, _ in self.edges.values():
            ax, ay = self.node_positions[a]
            bx, by = self.node_positions[b]
            out.append(math.hypot(bx - ax, by - ay))
        return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _cluster_points(
    points: list[tuple[float, float]], tol: float
) -> tuple[list[tuple[float, float]], list[int]]:
    """Union-find proximity clustering; returns (centroids, point->cluster)."""
    n = len(points)
    uf = _UnionFind(n)
    arr = np.asarray(points)
    for i in range(n):
        d = np.hypot(arr[i + 1 :, 0] - arr[i, 0], arr[i + 1 :, 1] - arr[i, 1])
        for j in np.flatnonzero(d <= tol):
            uf.union(i, i + 1 + int(j))
    roots: dict[int, int] = {}
    assignment = []
    for i in range(n):
        r = uf.find(i)
        if r not in roots:
            roots[r] = len(roots)
        assignment.append(roots[r])
    centroids = []
    for c in range(len(roots)):
        members = arr[[i for i in range(n) if assignment[i] == c]]
        centroids.append((float(members[:, 0].mean()), float(members[:, 1].mean())))
    return centroids, assignment


def _segment_intersection(
    p0: tuple[float, float],
    p1: tuple[float, float],
    q0: tuple[float, float],
    q1: tuple[float, float],
    eps: float = 1e-9,
) -> tuple[float, float, tuple[float, float]] | None:
    """Proper interior intersection of two segments, or None.

    Returns (t, u, point) with t, u the parametric positions in (0, 1).
    """
    dx1, dy1 = p1[0] - p0[0], p1[1] - p0[1]
    dx2, dy2 = q1[0] - q0[0], q1[1] - q0[1]
    denom = dx1 * dy2 - dy1 * dx2
    if abs(denom) < eps:
        return None
    rx, ry = q0[0] - p0[0], q0[1] - p0[1]
    t = (rx * dy2 - ry * dx2) / denom
    u = (rx * dy1 - ry * dx1) / denom
    if eps < t < 1 - eps and eps < u < 1 - eps:
        return t, u, (p0[0] + t * dx1, p0[1] + t * dy1)
    return None


def build_graph(scene: VectorScene, snap_tol: float = DEFAULT_SNAP_TOL) -> ParametricGraph:
    """Convert a vector scene into a node/edge graph.

    Endpoints within snap_tol merge into single nodes at their centroid;
    segment crossings split both segments at a shared intersection node;
    endpoints lying on another segment's interior split that segment too
    (T-junctions). Every edge is tagged as a wall.
    """
    if snap_tol <= 0:
        raise ParamError(f"snap_tol must be positive, got {snap_tol}")
    if not scene.segments:
        raise EmptySceneError("scene contains no segments")

    endpoints: list[tuple[float, float]] = []
    for seg in scene.segments:
        endpoints.append(seg.p0)
        endpoints.append(seg.p1)
    centroids, cluster_of = _cluster_points(endpoints, snap_tol)

    # Collect intersection points of crossing segments, clustered with the
    # endpoint nodes so that crossings near a corner reuse the corner node.
    seg_nodes: list[tuple[int, int]] = [
        (cluster_of[2 * i], cluster_of[2 * i + 1]) for i in range(len(scene.segments))
    ]
    positions: list[tuple[float, float]] = list(centroids)
    crossing_events: dict[int, list[tuple[float, int]]] = {
        i: [] for i in range(len(scene.segments))
    }
    for i in range(len(scene.segments)):
        si = scene.segments[i]
        for j in range(i + 1, len(scene.segments)):
            sj = scene.segments[j]
            hit = _segment_intersection(si.p0, si.p1, sj.p0, sj.p1)
            if hit is None:
                continue
            t, u, point = hit
            node_id = None
            for k, pos in enumerate(positions):
                if math.hypot(pos[0] - point[0], pos[1] - point[1]) <= snap_tol:
                    node_id = k
                    break
            if node_id is None:
                node_id = len(positions)
                positions.append(point)
            crossing_events[i].append((t, node_id))
            crossing_events[j].append((u, node_id))

    # T-junctions: existing nodes sitting on a segment's interior.
    for i, seg in enumerate(scene.segments):
        a, b = seg_nodes[i]
        dx, dy = seg.p1[0] - seg.p0[0], seg.p1[1] - seg.p0[1]
        L2 = dx * dx + dy * dy
        for k, pos in enumerate(positions):
            if k in (a, b) or k in [nid for _, nid in crossing_events[i]]:
                continue
            t = ((pos[0] - seg.p0[0]) * dx + (pos[1] - seg.p0[1]) * dy) / L2
            if not 0.0 < t < 1.0:
                continue
            px = seg.p0[0] + t * dx - pos[0]
            py = seg.p0[1] + t * dy - pos[1]
            if math.hypot(px, py) <= snap_tol:
                crossing_events[i].append((t, k))

    nodes = {k: pos for k, pos in enumerate(positions)}
    edges: dict[int, tuple[int, int, str]] = {}
    seen_pairs: set[tuple[int, int]] = set()
    next_edge = 0
    for i in range(len(scene.segments)):
        a, b = seg_nodes[i]
        chain = [a]
        for _, nid in sorted(crossing_events[i], key=lambda e: e[0]):
            chain.append(nid)
        chain.append(b)
        for u, v in zip(chain, chain[1:]):
            if u == v:
                continue
            key = (min(u, v), max(u, v))
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            edges[next_edge] = (u, v, "wall")
            next_edge += 1

    used = {n for a, b, _ in edges.values() for n in (a, b)}
    nodes = {k: v for k, v in nodes.items() if k in used}
    if not edges:
        raise EmptySceneError("scene collapsed to zero edges after snapping")
    graph = ParametricGraph(nodes=nodes, edges=edges, snap_tol=snap_tol)
    graph.validate()
    return graph


def _canonical_direction(dx: float, dy: float) -> tuple[float, float]:
    L = math.hypot(dx, dy)
    dx, dy = dx / L, dy / L
    if dx < -1e-12 or (abs(dx) <= 1e-12 and dy < 0):
        dx, dy = -dx, -dy
    if abs(dx) <= 1e-12:
        dx = 0.0
    if abs(dy) <= 1e-12:
        dy = 0.0
    return (dx, dy)


def _fit_axis(
    axis_id: int,
    edge_ids: list[int],
    graph: ParametricGraph,
) -> WallAxis:
    """Least-squares line fit over the member nodes; order by projection."""
    node_set: set[int] = set()
    for eid in edge_ids:
        a, b, _ = graph.edges[eid]
        node_set.update((a, b))
    pts = np.asarray([graph.nodes[n] for n in sorted(node_set)])
    ids = sorted(node_set)
    cx, cy = pts[:, 0].mean(), pts[:, 1].mean()
    sxx = ((pts[:, 0] - cx) ** 2).sum()
    syy = ((pts[:, 1] - cy) ** 2).sum()
    sxy = ((pts[:, 0] - cx) * (pts[:, 1] - cy)).sum()
    ang = 0.5 * math.atan2(2.0 * sxy, sxx - syy)
    ux, uy = _canonical_direction(math.cos(ang), math.sin(ang))
    proj = (pts[:, 0] - cx) * ux + (pts[:, 1] - cy) * uy
    order = np.argsort(proj, kind="stable")
    return WallAxis(
        id=axis_id,
        direction=(ux, uy),
        anchor=(float(cx), float(cy)),
        node_ids=tuple(ids[int(i)] for i in order),
        edge_ids=tuple(sorted(edge_ids)),
    )


def merge_collinear(
    graph: ParametricGraph,
    angle_tol: float = DEFAULT_ANGLE_TOL,
    collinear_tol: float = DEFAULT_COLLINEAR_TOL,
) -> ParametricGraph:
    """Fuse chains of connected collinear edges into wall axes.

    Edges sharing a node whose direction vectors agree within angle_tol
    merge into one axis; unmergeable edges become singleton axes. The axes
    partition the edge set, so translations can address whole walls.
    """
    edge_ids = sorted(graph.edges)
    index_of = {eid: i for i, eid in enumerate(edge_ids)}
    uf = _UnionFind(len(edge_ids))

    incident: dict[int, list[int]] = {}
    for eid in edge_ids:
        a, b, _ = graph.edges[eid]
        incident.setdefault(a, []).append(eid)
        incident.setdefault(b, []).append(eid)

    def direction_of(eid: int) -> tuple[float, float]:
        dx, dy = graph.edge_vector(eid)
        return _canonical_direction(dx, dy)

    for _, eids in sorted(incident.items()):
        for i in range(len(eids)):
            for j in range(i + 1, len(eids)):
                di, dj = direction_of(eids[i]), direction_of(eids[j])
                dot = abs(di[0] * dj[0] + di[1] * dj[1])
                if math.acos(min(1.0, dot)) <= angle_tol:
                    uf.union(index_of[eids[i]], index_of[eids[j]])

    clusters: dict[int, list[int]] = {}
    for eid in edge_ids:
        clusters.setdefault(uf.find(index_of[eid]), []).append(eid)

    axes: dict[int, WallAxis] = {}
    for axis_id, (_, members) in enumerate(sorted(clusters.items())):
        axis = _fit_axis(axis_id, members, graph)
        # Collinearity sanity: every member node within tolerance of the line.
        ux, uy = axis.direction
        ax, ay = axis.anchor
        for nid in axis.node_ids:
            px, py = graph.nodes[nid]
            off = -(px - ax) * uy + (py - ay) * ux
            if abs(off) > collinear_tol:
                raise ParamError(
                    f"axis {axis_id}: node {nid} off-line by {off:.3g} "
                    f"(> collinear_tol {collinear_tol})"
                )
        axes[axis_id] = axis
    out = replace(graph, axes=axes)
    out.validate()
    return out


GROUPING_CRITERIA = ("by_axis", "by_connectivity", "by_adjacent_nodes")


def group_elements(
    graph: ParametricGraph, criterion: str, radius: float | None = None
) -> ParametricGraph:
    """Populate node groups: per axis, per connected component, or by
    node proximity within a radius."""
    if criterion == "by_axis":
        if not graph.axes:
            raise ParamError("graph has no axes; run merge_collinear first")
        groups = {
            axis.id: ("by_axis", tuple(axis.node_ids))
            for axis in graph.axes.values()
        }
    elif criterion == "by_connectivity":
        node_ids = sorted(graph.nodes)
        index_of = {n: i for i, n in enumerate(node_ids)}
        uf = _UnionFind(len(node_ids))
        for a, b, _ in graph.edges.values():
            uf.union(index_of[a], index_of[b])
        comps: dict[int, list[int]] = {}
        for n in node_ids:
            comps.setdefault(uf.find(index_of[n]), []).append(n)
        groups = {
            gid: ("by_connectivity", tuple(sorted(members)))
            for gid, (_, members) in enumerate(sorted(comps.items()))
        }
    elif criterion == "by_adjacent_nodes":
        if radius is None or radius <= 0:
            raise ParamError("by_adjacent_nodes needs a positive radius")
        node_ids = sorted(graph.nodes)
        pts = [graph.nodes[n] for n in node_ids]
        _, assignment = _cluster_points(pts, radius)
        clusters: dict[int, list[int]] = {}
        for n, c in zip(node_ids, assignment):
            clusters.setdefault(c, []).append(n)
        groups = {
            gid: ("by_adjacent_nodes", tuple(sorted(members)))
            for gid, (_, members) in enumerate(sorted(clusters.items()))
        }
    else:
        raise ParamError(
            f"unknown grouping criterion {criterion!r}; "
            f"expected one of {GROUPING_CRITERIA}"
        )
    return replace(graph, groups=groups)


def collect_axis_nodes(graph: ParametricGraph, axis_id: int) -> tuple[int, ...]:
    """Ordered node ids along an axis, junction nodes included."""
    if axis_id not in graph.axes:
        raise NotFoundError(f"axis {axis_id} does not exist")
    return graph.axes[axis_id].node_ids


def _refit_axes(graph: ParametricGraph, moved_nodes: set[int]) -> dict[int, WallAxis]:
    axes = {}
    for axis in graph.axes.values():
        if moved_nodes.intersection(axis.node_ids):
            axes[axis.id] = _fit_axis(axis.id, list(axis.edge_ids), graph)
        else:
            axes[axis.id] = axis
    return axes


def _check_degeneracy(
    old: ParametricGraph, new: ParametricGraph, moved_axis: int
) -> None:
    """Reject translations that collapse nodes, reverse edges, or land
    parallel axes on top of each other."""
    tol = new.snap_tol
    ids = sorted(new.nodes)
    pts = np.asarray([new.nodes[n] for n in ids])
    if len(ids) > 1:
        d2 = (
            (pts[:, None, 0] - pts[None, :, 0]) ** 2
            + (pts[:, None, 1] - pts[None, :, 1]) ** 2
        )
        np.fill_diagonal(d2, np.inf)
        if d2.min() < tol * tol:
            i, j = np.unravel_index(int(d2.argmin()), d2.shape)
            raise DegenerateLayoutError(
                f"nodes {ids[int(i)]} and {ids[int(j)]} collapse within snap_tol"
            )
    for eid in new.edges:
        ox, oy = old.edge_vector(eid)
        nx_, ny_ = new.edge_vector(eid)
        if ox * nx_ + oy * ny_ <= 0:
            raise DegenerateLayoutError(f"edge {eid} reversed or collapsed")
    moved = new.axes[moved_axis]
    ux, uy = moved.direction
    ax, ay = moved.anchor
    lo_m, hi_m = _axis_span(new, moved)
    for axis in new.axes.values():
        if axis.id == moved_axis:
            continue
        dot = abs(axis.direction[0] * ux + axis.direction[1] * uy)
        if dot < math.cos(DEFAULT_ANGLE_TOL):
            continue
        off = -(axis.anchor[0] - ax) * uy + (axis.anchor[1] - ay) * ux
        if abs(off) >= tol:
            continue
        lo_o, hi_o = _axis_span(new, axis)
        if min(hi_m, hi_o) - max(lo_m, lo_o) > 0:
            raise DegenerateLayoutError(
                f"axis {moved_axis} collapses onto parallel axis {axis.id}"
            )


def _axis_span(graph: ParametricGraph, axis: WallAxis) -> tuple[float, float]:
    ux, uy = axis.direction
    projs = [
        graph.nodes[n][0] * ux + graph.nodes[n][1] * uy for n in axis.node_ids
    ]
    return min(projs), max(projs)


def apply_translation(
    graph: ParametricGraph, axis_id: int, delta: float
) -> ParametricGraph:
    """Slide a wall axis by delta along its normal.

    Every node of the axis moves together; edges incident to moved nodes
    follow, stretching the crossing walls instead of tearing gaps. Axes
    containing moved nodes are refit. Raises DegenerateLayoutError when the
    result would collapse nodes or fold the layout.
    """
    if axis_id not in graph.axes:
        raise NotFoundError(f"axis {axis_id} does not exist")
    if not math.isfinite(delta):
        raise ParamError(f"delta must be finite, got {delta}")
    if delta == 0.0:
        return graph
    axis = graph.axes[axis_id]
    nx_, ny_ = axis.normal
    moved = set(axis.node_ids)
    nodes = {
        nid: (
            (pos[0] + delta * nx_, pos[1] + delta * ny_) if nid in moved else pos
        )
        for nid, pos in graph.nodes.items()
    }
    out = replace(graph, nodes=nodes)
    out = replace(out, axes=_refit_axes(out, moved))
    _check_degeneracy(graph, out, axis_id)
    out.validate()
    return out


def instantiate(
    graph: ParametricGraph,
    assignment: dict[int, float],
    variables: list,
) -> FloorplanLayout:
    """Apply a variable assignment and emit the concrete layout.

    Variables apply in ascending id order; each must be within its range.
    Polylines follow the axis node arrays of the translated graph.
    """
    by_id = {v.id: v for v in variables}
    for vid in assignment:
        if vid not in by_id:
            raise RangeError(f"assignment references unknown variable {vid}")
    g = graph
    for vid in sorted(by_id):
        var = by_id[vid]
        delta = float(assignment.get(vid, 0.0))
        if not (var.lo <= delta <= var.hi):
            raise RangeError(
                f"variable {vid}: value {delta} outside [{var.lo}, {var.hi}]"
            )
        if delta != 0.0:
            g = apply_translation(g, var.axis_id, delta)
    polylines = []
    for axis_id in sorted(g.axes):
        axis = g.axes[axis_id]
        polylines.append(tuple(g.nodes[n] for n in axis.node_ids))
    return FloorplanLayout(
        polylines=tuple(polylines),
        node_positions=dict(g.nodes),
        edges=dict(g.edges),
    )
