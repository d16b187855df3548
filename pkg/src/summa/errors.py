"""Error types and the shared negative-verdict value.

Errors signal violated preconditions or failed computations.  Negative
*verdicts* (a check that ran fine and concluded "no") are ordinary return
values: ``Failure`` here, ``NotFound`` in :mod:`summa.recursion` and
``Inconclusive`` in :mod:`summa.regular`.
"""


class SummaError(Exception):
    """Base class for all library errors."""


class IndexOutOfRange(SummaError):
    """Coefficient index outside the series' available window."""


class SeedLengthMismatch(SummaError):
    """Number of seed coefficients does not match the recursion order."""


class InsufficientData(SummaError):
    """Not enough nonzero coefficients for the requested estimate."""


class InsufficientCoefficients(SummaError):
    """Window too short for the requested Hankel determinant."""


class EmptyInput(SummaError):
    """An empty coefficient sequence was supplied."""


class RecursionNotVerified(SummaError):
    """Reconstruction requested from a recursion that fails on the data."""


class DegreeZero(SummaError):
    """Root finding requested for a constant polynomial."""


class NearPole(SummaError):
    """Evaluation point too close to a denominator root."""


class WeightKindMismatch(SummaError):
    """Moment weight incompatible with the requested operator kind."""


class NotAFormalSolution(SummaError):
    """Series does not solve the equation through the checked order."""


class DirectionNotSummable(SummaError):
    """Requested ray too close to a singular direction."""


class KernelNonDecaying(SummaError):
    """Laplace kernel does not decay for the given (direction, point)."""


class ToleranceNotMet(SummaError):
    """Adaptive quadrature exhausted its subdivision budget."""


class ZeroArgument(SummaError):
    """Theta function evaluated at 0."""


class ThetaZeroOnRay(SummaError):
    """Integration ray passes through (or too close to) a theta zero."""


class DenominatorHitsRoot(SummaError):
    """A q-lattice point coincides with a root of the denominator."""


class SampleOutsideDomain(SummaError):
    """Evaluation sample outside the evaluator's validity domain."""


class UnsupportedKind(SummaError):
    """Operation not available for this operator kind."""


class WindowExceeded(SummaError):
    """Requested index range exceeds the sequence window."""


class SupAtWindowEdge(SummaError):
    """Supremum scan hit the window edge; result would be unreliable."""


class NotYetPositive(SummaError):
    """Associated function not yet positive at the requested point."""


class RootsNotConverged(SummaError):
    """Polynomial root residuals above the requested threshold."""


class ParseError(SummaError):
    """Malformed input; message carries the position when known."""


class Failure:
    """Negative verdict carrying a reason.  Falsy; not an exception."""

    __slots__ = ("reason", "details")

    def __init__(self, reason, details=None):
        self.reason = reason
        self.details = details

    def __bool__(self):
        return False

    def __repr__(self):
        if self.details is None:
            return f"Failure({self.reason!r})"
        return f"Failure({self.reason!r}, {self.details!r})"
