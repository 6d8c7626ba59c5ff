"""Exception hierarchy shared by every module of the package."""


class QPsiError(Exception):
    """Base class for all errors raised by qpsi."""


class PoleError(QPsiError, ZeroDivisionError):
    """A denominator factor vanishes (or falls inside the pole margin)."""


class ModeError(QPsiError):
    """Operation not available in the requested arithmetic mode."""


class NonconvergenceError(QPsiError):
    """A series or product failed its convergence test."""


class DegenerateInputError(QPsiError, ZeroDivisionError):
    """Input lies on an excluded degenerate locus of a closed formula."""


class SamplingExhaustedError(QPsiError):
    """Rejection sampling could not find a point in the requested domain."""


class UnknownIdentityError(QPsiError, KeyError):
    """Registry lookup with an id that does not exist."""
