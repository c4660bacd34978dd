"""Exception types shared across the library.

Every domain error raised by the forest, the algorithms, the adversaries or
the harness is a subclass of :class:`ForestError`, so callers can catch one
base type at the CLI boundary.
"""


class ForestError(Exception):
    """Base class for all library errors."""


class PaletteError(ForestError):
    """Invalid (delta, extra) combination."""


class SameComponent(ForestError):
    """Insertion endpoints already share a component (would create a cycle)."""


class DegreeExceeded(ForestError):
    """Insertion would push an endpoint past the maximum degree."""


class DuplicateEdge(ForestError):
    """Edge already present."""


class MissingEdge(ForestError):
    """Edge not present."""


class ImproperColoring(ForestError):
    """A structural or properness invariant is violated.

    Carries the offending vertex and color when known.
    """

    def __init__(self, message, vertex=None, color=None):
        super().__init__(message)
        self.vertex = vertex
        self.color = color


class NotRoot(ForestError):
    """Rooted-model update named a vertex that is not a component root."""


class WrongPalette(ForestError):
    """Algorithm precondition on kappa/delta/extra not met."""


class ScriptExhausted(ForestError):
    """A scripted tie-breaker ran out of choices."""


class TooLarge(ForestError):
    """Instance exceeds a brute-force guard limit."""


class InsufficientSamples(ForestError):
    """Histogram too small for the requested goodness-of-fit test."""


class InsufficientVertices(ForestError):
    """Adversary construction needs more vertices than the forest has."""


class DepthTooSmall(ForestError):
    """Layered-cycle construction needs a deeper tree."""


class NotApplicable(ForestError):
    """Adversary bootstrap aborted because the algorithm is not lazy."""


class ParseError(ForestError):
    """Malformed sequence or snapshot text; carries a line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
