"""The parametric model bundle and the scene-to-model transformer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from sklearn.base import BaseEstimator, TransformerMixin

from .annotation import (
    DEFAULT_SEARCH_RADIUS,
    DesignVariable,
    bind_annotations,
    detect_annotations,
    split_annotation_strokes,
)
from .parametrizer import (
    DEFAULT_COLLINEAR_TOL,
    DEFAULT_SNAP_TOL,
    FloorplanLayout,
    ParametricGraph,
    build_graph,
    group_elements,
    instantiate,
    merge_collinear,
)
from .vectorizer import VectorScene


@dataclass(frozen=True)
class ParametricModel:
    """A constrained floorplan: graph, bound design variables, warnings."""

    graph: ParametricGraph
    variables: tuple[DesignVariable, ...]
    warnings: tuple[str, ...] = ()
    provenance: dict = field(default_factory=dict)

    def bounds(self) -> list[tuple[float, float]]:
        """Variable boxes in ascending id order."""
        return [(v.lo, v.hi) for v in sorted(self.variables, key=lambda v: v.id)]

    def layout(self, assignment: dict[int, float] | None = None) -> FloorplanLayout:
        return instantiate(self.graph, assignment or {}, list(self.variables))


class Parametrizer(BaseEstimator, TransformerMixin):
    """VectorScene to ParametricModel, sklearn-style.

    Splits annotation strokes from the layout, builds the snapped graph,
    merges collinear chains into wall axes, groups nodes, and binds each
    I-mark to a wall axis as a bounded design variable.
    """

    def __init__(
        self,
        snap_tol=DEFAULT_SNAP_TOL,
        angle_tol_deg=5.0,
        collinear_tol=DEFAULT_COLLINEAR_TOL,
        grouping="by_axis",
        grouping_radius=None,
        search_radius=DEFAULT_SEARCH_RADIUS,
    ):
        self.snap_tol = snap_tol
        self.angle_tol_deg = angle_tol_deg
        self.collinear_tol = collinear_tol
        self.grouping = grouping
        self.grouping_radius = grouping_radius
        self.search_radius = search_radius

    def fit(self, X, y=None):
        return self

    def transform(self, X: VectorScene) -> ParametricModel:
        layout_scene, marks_raw = split_annotation_strokes(X)
        graph = build_graph(layout_scene, snap_tol=self.snap_tol)
        graph = merge_collinear(
            graph,
            angle_tol=math.radians(self.angle_tol_deg),
            collinear_tol=self.collinear_tol,
        )
        graph = group_elements(graph, self.grouping, radius=self.grouping_radius)
        marks, warn_detect = detect_annotations(marks_raw)
        variables, warn_bind = bind_annotations(
            graph, marks, search_radius=self.search_radius
        )
        return ParametricModel(
            graph=graph,
            variables=tuple(variables),
            warnings=tuple(warn_detect + warn_bind),
            provenance=dict(X.provenance),
        )
