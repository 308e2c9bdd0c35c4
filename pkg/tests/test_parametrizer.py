import math

import numpy as np
import pytest

from sketchopt.annotation import DesignVariable
from sketchopt.errors import (
    DegenerateLayoutError,
    EmptySceneError,
    NotFoundError,
    ParamError,
    RangeError,
)
from sketchopt.parametrizer import (
    apply_translation,
    build_graph,
    collect_axis_nodes,
    group_elements,
    instantiate,
    merge_collinear,
)
from sketchopt.vectorizer import VectorScene

from conftest import make_scene, make_segment, square_scene


def square_graph(side=10.0):
    g = build_graph(square_scene(side=side), snap_tol=1.0)
    return merge_collinear(g)


def axis_at(graph, predicate):
    for axis in graph.axes.values():
        if predicate(axis):
            return axis
    raise AssertionError("no axis matched")


def vertical_axis_at_x(graph, x, tol=0.5):
    return axis_at(
        graph,
        lambda a: abs(a.direction[1]) > 0.9
        and all(abs(graph.nodes[n][0] - x) <= tol for n in a.node_ids),
    )


class TestBuildGraph:
    def test_endpoint_snap_merges_corner(self):
        scene = make_scene(
            make_segment(0, 0, 10, 0), make_segment(10.5, 0.2, 10.5, 8)
        )
        g = build_graph(scene, snap_tol=1.0)
        assert len(g.nodes) == 3
        assert len(g.edges) == 2
        shared = [
            nid
            for nid in g.nodes
            if sum(nid in (a, b) for a, b, _ in g.edges.values()) == 2
        ]
        assert len(shared) == 1
        # merged position is the centroid of the two near endpoints
        assert g.nodes[shared[0]] == pytest.approx((10.25, 0.1))

    def test_crossing_split(self):
        scene = make_scene(
            make_segment(0, 5, 10, 5), make_segment(5, 0, 5, 10)
        )
        g = build_graph(scene, snap_tol=1.0)
        assert len(g.nodes) == 5
        assert len(g.edges) == 4

    def test_jittered_square_euler(self, rng):
        for _ in range(10):
            jitter = rng.uniform(-0.4, 0.4, size=(4, 2))
            corners = np.array([(20, 20), (120, 20), (120, 90), (20, 90)], float)
            segs = []
            for i in range(4):
                a = corners[i] + jitter[i]
                b = corners[(i + 1) % 4] + jitter[(i + 1) % 4] * 0.5
                segs.append(make_segment(*a, *b))
            g = build_graph(make_scene(*segs), snap_tol=4.0)
            assert len(g.nodes) == 4
            assert len(g.edges) == 4  # V - E = 0: one cycle

    def test_empty_scene(self):
        scene = VectorScene(segments=(), image_size=(10, 10), luminosity_range=1.0)
        with pytest.raises(EmptySceneError):
            build_graph(scene)

    def test_t_junction_endpoint_on_interior(self):
        scene = make_scene(
            make_segment(0, 0, 10, 0), make_segment(5, 0, 5, 5)
        )
        g = build_graph(scene, snap_tol=0.5)
        # junction node splits the horizontal segment
        assert len(g.nodes) == 4
        assert len(g.edges) == 3


class TestMergeCollinear:
    def test_chained_collinear_edges_merge(self):
        scene = make_scene(
            make_segment(0, 0, 5, 0), make_segment(5, 0, 10, 0)
        )
        g = merge_collinear(build_graph(scene, snap_tol=0.5))
        assert len(g.axes) == 1
        axis = next(iter(g.axes.values()))
        assert [g.nodes[n] for n in axis.node_ids] == [
            pytest.approx((0, 0)),
            pytest.approx((5, 0)),
            pytest.approx((10, 0)),
        ]

    def test_perpendicular_edges_stay_apart(self):
        scene = make_scene(
            make_segment(0, 0, 5, 0), make_segment(5, 0, 5, 5)
        )
        g = merge_collinear(build_graph(scene, snap_tol=0.5))
        assert len(g.axes) == 2

    def test_t_junction_membership(self):
        scene = make_scene(
            make_segment(0, 0, 10, 0), make_segment(5, 0, 5, 5)
        )
        g = merge_collinear(build_graph(scene, snap_tol=0.5))
        horizontal = axis_at(g, lambda a: abs(a.direction[0]) > 0.9)
        vertical = axis_at(g, lambda a: abs(a.direction[1]) > 0.9)
        assert len(horizontal.edge_ids) == 2  # merged through the junction
        assert len(vertical.edge_ids) == 1
        junction = [
            n for n in horizontal.node_ids if g.nodes[n] == pytest.approx((5, 0))
        ]
        assert junction and junction[0] in vertical.node_ids

    def test_idempotent(self):
        g1 = square_graph()
        g2 = merge_collinear(g1)
        assert {a.id: (a.direction, a.node_ids, a.edge_ids) for a in g1.axes.values()} == {
            a.id: (a.direction, a.node_ids, a.edge_ids) for a in g2.axes.values()
        }

    def test_axes_partition_edges(self):
        g = square_graph()
        covered = sorted(eid for a in g.axes.values() for eid in a.edge_ids)
        assert covered == sorted(g.edges)


class TestGroupElements:
    def test_square_by_connectivity_single_group(self):
        g = group_elements(square_graph(), "by_connectivity")
        assert len(g.groups) == 1
        (_, members), = g.groups.values()
        assert len(members) == 4

    def test_square_by_axis_four_groups(self):
        g = group_elements(square_graph(), "by_axis")
        assert len(g.groups) == 4
        assert all(len(m) == 2 for _, m in g.groups.values())

    def test_two_rectangles_two_components(self):
        s1 = square_scene(x0=10, y0=10, side=10)
        s2 = square_scene(x0=60, y0=60, side=15)
        g = merge_collinear(
            build_graph(make_scene(*(s1.segments + s2.segments)), snap_tol=1.0)
        )
        g = group_elements(g, "by_connectivity")
        assert len(g.groups) == 2

    def test_adjacent_nodes_radius(self):
        g = group_elements(square_graph(side=10.0), "by_adjacent_nodes", radius=11.0)
        assert len(g.groups) == 1
        g = group_elements(square_graph(side=10.0), "by_adjacent_nodes", radius=5.0)
        assert len(g.groups) == 4

    def test_unknown_criterion(self):
        with pytest.raises(ParamError):
            group_elements(square_graph(), "by_magic")


class TestCollectAxisNodes:
    def test_projection_order_with_crossings(self):
        scene = make_scene(
            make_segment(0, 10, 10, 10),
            make_segment(4, 7, 4, 13),
            make_segment(7, 7, 7, 13),
        )
        g = merge_collinear(build_graph(scene, snap_tol=0.5))
        horizontal = axis_at(g, lambda a: abs(a.direction[0]) > 0.9)
        nodes = collect_axis_nodes(g, horizontal.id)
        xs = [g.nodes[n][0] for n in nodes]
        assert xs == pytest.approx([0, 4, 7, 10])

    def test_singleton_axis_two_endpoints(self):
        g = merge_collinear(build_graph(make_scene(make_segment(0, 0, 9, 0)), snap_tol=0.5))
        axis = next(iter(g.axes.values()))
        assert len(collect_axis_nodes(g, axis.id)) == 2

    def test_missing_axis(self):
        with pytest.raises(NotFoundError):
            collect_axis_nodes(square_graph(), 999)

    def test_projections_strictly_increase_random_plans(self, rng):
        for _ in range(10):
            xs = np.sort(rng.choice(np.arange(20, 180, 12), 4, replace=False))
            ys = np.sort(rng.choice(np.arange(20, 180, 12), 3, replace=False))
            segs = [make_segment(xs[0], y, xs[-1], y) for y in ys]
            segs += [make_segment(x, ys[0], x, ys[-1]) for x in xs]
            g = merge_collinear(build_graph(make_scene(*segs), snap_tol=1.0))
            for axis in g.axes.values():
                proj = [
                    g.nodes[n][0] * axis.direction[0] + g.nodes[n][1] * axis.direction[1]
                    for n in axis.node_ids
                ]
                assert all(b > a for a, b in zip(proj, proj[1:]))


class TestApplyTranslation:
    def test_square_right_wall_slides(self):
        g = square_graph()
        axis = vertical_axis_at_x(g, 30.0)
        delta = 2.0 if axis.normal[0] > 0 else -2.0
        moved = apply_translation(g, axis.id, delta)
        for n in axis.node_ids:
            assert moved.nodes[n][0] == pytest.approx(32.0)
        assert moved.adjacency() == g.adjacency()

    def test_zero_delta_identity(self):
        g = square_graph()
        axis = next(iter(g.axes.values()))
        moved = apply_translation(g, axis.id, 0.0)
        assert moved.nodes == g.nodes

    def test_t_junction_moves_with_axis(self):
        scene = make_scene(
            make_segment(0, 0, 10, 0), make_segment(5, 0, 5, 6)
        )
        g = merge_collinear(build_graph(scene, snap_tol=0.5))
        horizontal = axis_at(g, lambda a: abs(a.direction[0]) > 0.9)
        # normal of the horizontal axis is vertical
        sign = 1.0 if horizontal.normal[1] > 0 else -1.0
        moved = apply_translation(g, horizontal.id, sign * 2.0)
        junction = [
            n for n in horizontal.node_ids
            if g.nodes[n] == pytest.approx((5, 0))
        ][0]
        assert moved.nodes[junction] == pytest.approx((5, 2))
        assert moved.adjacency() == g.adjacency()
        # crossing wall stretches: its far endpoint stays
        vertical = axis_at(g, lambda a: abs(a.direction[1]) > 0.9)
        far = [n for n in vertical.node_ids if g.nodes[n] == pytest.approx((5, 6))][0]
        assert moved.nodes[far] == pytest.approx((5, 6))

    def test_collinearity_maintained_after_translation(self):
        scene = make_scene(
            make_segment(0, 10, 10, 10),
            make_segment(4, 5, 4, 15),
        )
        g = merge_collinear(build_graph(scene, snap_tol=0.5))
        horizontal = axis_at(g, lambda a: abs(a.direction[0]) > 0.9)
        moved = apply_translation(g, horizontal.id, 1.5)
        axis = moved.axes[horizontal.id]
        ux, uy = axis.direction
        ax, ay = axis.anchor
        for n in axis.node_ids:
            px, py = moved.nodes[n]
            off = -(px - ax) * uy + (py - ay) * ux
            assert abs(off) < 1e-9

    def test_collapse_onto_parallel_axis_rejected(self):
        g = square_graph(side=10.0)
        right = vertical_axis_at_x(g, 30.0)
        delta = -9.9 if right.normal[0] > 0 else 9.9
        with pytest.raises(DegenerateLayoutError):
            apply_translation(g, right.id, delta)

    def test_pass_through_rejected(self):
        g = square_graph(side=10.0)
        right = vertical_axis_at_x(g, 30.0)
        delta = -15.0 if right.normal[0] > 0 else 15.0
        with pytest.raises(DegenerateLayoutError):
            apply_translation(g, right.id, delta)

    def test_missing_axis(self):
        with pytest.raises(NotFoundError):
            apply_translation(square_graph(), 99, 1.0)

    def test_non_finite_delta(self):
        g = square_graph()
        axis = next(iter(g.axes.values()))
        with pytest.raises(ParamError):
            apply_translation(g, axis.id, math.nan)


class TestInstantiate:
    def _variable(self, graph, x, vid=0, half=5.0):
        axis = vertical_axis_at_x(graph, x)
        return DesignVariable(id=vid, axis_id=axis.id, lo=-half, hi=half)

    def test_empty_assignment_is_base_geometry(self):
        g = square_graph()
        layout = instantiate(g, {}, [])
        assert layout.node_positions == g.nodes

    def test_zero_value_identity(self):
        g = square_graph()
        var = self._variable(g, 30.0)
        layout = instantiate(g, {0: 0.0}, [var])
        assert layout.node_positions == g.nodes

    def test_out_of_range_rejected(self):
        g = square_graph()
        var = self._variable(g, 30.0, half=3.0)
        with pytest.raises(RangeError):
            instantiate(g, {0: 4.0}, [var])

    def test_commutativity_on_disjoint_axes(self):
        # two parallel interior walls of a wide plan; their axes share no nodes
        segs = [
            make_segment(0, 0, 60, 0),
            make_segment(0, 30, 60, 30),
            make_segment(0, 0, 0, 30),
            make_segment(60, 0, 60, 30),
            make_segment(20, 0, 20, 30),
            make_segment(40, 0, 40, 30),
        ]
        g = merge_collinear(build_graph(make_scene(*segs), snap_tol=1.0))
        v1 = self._variable(g, 20.0, vid=0)
        v2 = self._variable(g, 40.0, vid=1)
        l_12 = instantiate(g, {0: 2.0, 1: -1.0}, [v1, v2])
        # apply in the reverse *id* order by renaming ids
        v1b = DesignVariable(id=1, axis_id=v1.axis_id, lo=v1.lo, hi=v1.hi)
        v2b = DesignVariable(id=0, axis_id=v2.axis_id, lo=v2.lo, hi=v2.hi)
        l_21 = instantiate(g, {1: 2.0, 0: -1.0}, [v1b, v2b])
        for nid in l_12.node_positions:
            a = l_12.node_positions[nid]
            b = l_21.node_positions[nid]
            assert a == pytest.approx(b, abs=1e-12)

    def test_polylines_follow_axes(self):
        g = square_graph()
        layout = instantiate(g, {}, [])
        assert len(layout.polylines) == len(g.axes)


class TestRandomTranslationProperties:
    def test_topology_and_collinearity_under_random_translations(self, rng):
        for _ in range(20):
            xs = np.sort(rng.choice(np.arange(20, 200, 14), 4, replace=False))
            ys = np.sort(rng.choice(np.arange(20, 200, 14), 3, replace=False))
            segs = [make_segment(xs[0], y, xs[-1], y) for y in ys]
            segs += [make_segment(x, ys[0], x, ys[-1]) for x in xs]
            g = merge_collinear(build_graph(make_scene(*segs), snap_tol=1.0))
            base_adj = g.adjacency()
            for _ in range(5):
                axis_id = int(rng.choice(sorted(g.axes)))
                delta = float(rng.uniform(-4, 4))
                try:
                    g = apply_translation(g, axis_id, delta)
                except DegenerateLayoutError:
                    continue
                assert g.adjacency() == base_adj
                for axis in g.axes.values():
                    ux, uy = axis.direction
                    ax, ay = axis.anchor
                    for n in axis.node_ids:
                        px, py = g.nodes[n]
                        assert abs(-(px - ax) * uy + (py - ay) * ux) < 1e-9
