"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its documented exit statuses without a lookup table.
"""

from __future__ import annotations


class GraphIFError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    kind = "error"

    def to_dict(self) -> dict:
        return {"error": self.kind, "type": type(self).__name__, "message": str(self)}


class InvalidInputError(GraphIFError, ValueError):
    exit_code = 2
    kind = "invalid-input"


class NumericFailureError(GraphIFError, ArithmeticError):
    exit_code = 3
    kind = "numeric-failure"


class DataIOError(GraphIFError, OSError):
    exit_code = 4
    kind = "io-error"


class IsolatedVertexError(InvalidInputError):
    kind = "isolated-vertex"


class TriangulationError(InvalidInputError):
    kind = "triangulation-failure"


class UnreachablePairError(InvalidInputError):
    kind = "unreachable-pair"

    def __init__(self, i: int, j: int):
        super().__init__(f"vertex {j} is unreachable from vertex {i}")
        self.pair = (i, j)


class IngestionError(InvalidInputError):
    kind = "ingestion"


class WindowSupportError(InvalidInputError):
    kind = "window-support"


class WindowDegenerateError(InvalidInputError):
    kind = "window-degenerate"


class OuterLoopTerminal(InvalidInputError):
    """Fewer than two extrema: there is nothing left to sift."""

    kind = "outer-loop-terminal"


class DivergenceError(NumericFailureError):
    kind = "divergence"


class HypothesisViolationError(NumericFailureError):
    kind = "hypothesis-violated"


class NonConvergenceError(NumericFailureError):
    kind = "non-convergence"
