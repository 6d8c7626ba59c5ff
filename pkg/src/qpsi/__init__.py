"""Verification engine for curious extensions of Ramanujan's 1psi1 summation."""

from .errors import (
    DegenerateInputError,
    ModeError,
    NonconvergenceError,
    PoleError,
    QPsiError,
    SamplingExhaustedError,
    UnknownIdentityError,
)
from .qcore import (
    Field,
    ParameterPoint,
    QTerm,
    TermSeries,
    binomial,
    qpoch_finite,
    qpoch_infinite,
    rising_factorial,
    sum_series,
)

__version__ = "0.1.0"
