"""Exception hierarchy shared across the package."""


class ChronoscaleError(Exception):
    """Base class for all package errors."""


class EmptyScaleError(ChronoscaleError):
    """A time scale was constructed from no segments."""


class NotInScaleError(ChronoscaleError):
    """A point required to be a member of the scale is not."""


class BadIntervalError(ChronoscaleError):
    """Interval endpoints are out of order or otherwise unusable."""


class ScaleSpecError(ChronoscaleError):
    """A scale description (JSON document or CLI shorthand) is malformed."""


class EvalDomainError(ChronoscaleError):
    """Function evaluation left the real domain (log of nonpositive, division
    by zero, nonfinite result)."""


class TabulationGapError(ChronoscaleError):
    """A tabulated function was queried outside its knot range."""


class OutsideKappaDomainError(ChronoscaleError):
    """Delta derivative requested at a point excluded from the derivative
    domain (a left-scattered maximum)."""


class NoConvergenceError(ChronoscaleError):
    """A numerical routine (extrapolated quotient or adaptive quadrature)
    could not reach the requested tolerance."""


class BadSubstitutionError(ChronoscaleError):
    """The inner map of a substitution is not strictly increasing."""


class QuotientUndefinedError(ChronoscaleError):
    """g * (g o sigma) vanishes, so the quotient rule does not apply."""


class NotDifferentiableError(ChronoscaleError):
    """Symbolic differentiation hit a non-differentiable primitive."""


class ParseError(ChronoscaleError):
    """Expression syntax error, carrying the byte offset and the set of
    token kinds that would have been accepted there."""

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += " (expected: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)
