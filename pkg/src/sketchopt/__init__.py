"""Sketch-based parametric floorplan models with NSGA-II exploration.

A raster floorplan sketch is vectorized into line segments, converted to
a constrained parametric graph, annotated walls become bounded design
variables, and NSGA-II searches the variable box against structural proxy
objectives, yielding a Pareto front of floorplan variants.
"""

from .annotation import AnnotationMark, DesignVariable
from .errors import (
    ConfigError,
    DegenerateLayoutError,
    EmptySceneError,
    FormatError,
    InfeasibleProblemError,
    IoError,
    NotFoundError,
    ObjectiveError,
    ParamError,
    RangeError,
    SchemaError,
    SketchOptError,
)
from .model import ParametricModel, Parametrizer
from .nsga2 import NSGA2, OptConfig, ParetoFront, evolve, run_nsga2
from .objective import ObjectiveVector, StructuralModel, build_registry
from .parametrizer import FloorplanLayout, ParametricGraph, WallAxis
from .raster import RasterImage, ResolutionStack, build_pyramid, load_raster
from .vectorizer import LineSegment, VectorScene, Vectorizer

__version__ = "0.1.0"

__all__ = [
    "AnnotationMark",
    "ConfigError",
    "DegenerateLayoutError",
    "DesignVariable",
    "EmptySceneError",
    "FloorplanLayout",
    "FormatError",
    "InfeasibleProblemError",
    "IoError",
    "LineSegment",
    "NSGA2",
    "NotFoundError",
    "ObjectiveError",
    "ObjectiveVector",
    "OptConfig",
    "ParamError",
    "ParametricGraph",
    "ParametricModel",
    "Parametrizer",
    "ParetoFront",
    "RangeError",
    "RasterImage",
    "ResolutionStack",
    "SchemaError",
    "SketchOptError",
    "StructuralModel",
    "VectorScene",
    "Vectorizer",
    "WallAxis",
    "build_pyramid",
    "build_registry",
    "evolve",
    "load_raster",
    "run_nsga2",
]
