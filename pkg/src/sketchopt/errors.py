"""Exception hierarchy shared across the pipeline stages."""


class SketchOptError(Exception):
    """Base class for all errors raised by this package."""


class IoError(SketchOptError):
    """A file could not be read or written."""


class FormatError(SketchOptError):
    """An input file is not in a supported format."""


class ParamError(SketchOptError):
    """An operation was called with degenerate or out-of-domain parameters."""


class SchemaError(SketchOptError):
    """A document does not match its published schema."""


class EmptySceneError(SketchOptError):
    """A vector scene contains no segments where at least one is required."""


class NotFoundError(SketchOptError):
    """A referenced graph entity (axis, node, edge) does not exist."""


class DegenerateLayoutError(SketchOptError):
    """A translation would collapse walls or invert the layout topology."""


class RangeError(SketchOptError):
    """An assignment value lies outside its design variable's range."""


class ConfigError(SketchOptError):
    """An optimization or pipeline configuration is unusable."""


class InfeasibleProblemError(SketchOptError):
    """Every sampled design is infeasible; the problem has no usable start."""


class ObjectiveError(SketchOptError):
    """A registered objective raised during evaluation."""

    def __init__(self, label: str, cause: BaseException):
        super().__init__(f"objective {label!r} failed: {cause}")
        self.label = label
        self.cause = cause
