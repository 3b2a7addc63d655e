"""Exception types shared across the solver, generator, and CLI layers."""


class DenominatorNonpositive(ValueError):
    """A ratio denominator evaluated to h(x) <= 0 at a visited point."""


class Infeasible(RuntimeError):
    """No strictly feasible interior point could be found for the region."""


class MaxIterations(RuntimeError):
    """An iterative solve hit its iteration cap before reaching tolerance."""


class NonConvexDetected(RuntimeError):
    """A subproblem Hessian was indefinite beyond tolerance."""


class LineSearchFailed(RuntimeError):
    """No backtracking step satisfied the sufficient-decrease test."""


class GenerationFailed(RuntimeError):
    """Random instance generation exhausted its resample budget."""


class DimensionTooLarge(ValueError):
    """Grid search was asked to enumerate more dimensions than it supports."""


class EmptyGrid(RuntimeError):
    """No feasible grid point exists at the requested resolution."""


class ParseError(ValueError):
    """A problem file could not be parsed into a Problem."""


class DimensionMismatch(ParseError):
    """Array shapes in a problem description disagree with its dimension."""


class ZeroVector(ValueError):
    """A reflection vector with zero norm was supplied."""
