"""Identity records and the id -> record registry."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, Optional, Tuple

from .errors import ModeError, UnknownIdentityError
from .qcore import ParameterPoint, QTerm, SeriesResult, TermSeries, as_qterm, sum_series


@dataclass(frozen=True)
class Degeneration:
    """A substitution collapsing one identity onto another.

    ``substitute`` maps a point of the *target* identity to the pair
    ``(source_point, target_point)``.  With ``normalized`` the check compares
    ``summand / lhs`` on both sides, i.e. the summands agree up to the
    k-independent constant by which the two closed forms differ.  ``fixed``
    pins target symbols (e.g. ``a = 0``) whenever a target point is sampled.
    """

    target: str
    description: str
    substitute: Callable[[ParameterPoint], Tuple[ParameterPoint, ParameterPoint]]
    normalized: bool = False
    k_range: Tuple[int, int] = (0, 8)
    fixed: Tuple[Tuple[str, object], ...] = ()


@dataclass(frozen=True)
class IdentityRecord:
    """One summation identity: closed form, summand and domain.

    ``ratios`` returns the convergence quantities that must be < 1 (e.g.
    ``|d/c|``); ``domain(p, margin)`` checks them against ``margin``.
    """

    id: str
    title: str
    params_required: Tuple[str, ...]
    lhs: Callable[[ParameterPoint], object]
    summand: Callable[[ParameterPoint, int], object]
    kind: str
    domain_text: str = "all parameters (pole-free)"
    ratios: Callable[[ParameterPoint], Dict[str, float]] = lambda p: {}
    degenerations: Tuple[Degeneration, ...] = ()
    uses_sqrt_a: bool = False
    exact_capable: bool = False

    def domain(self, p: ParameterPoint, margin: float = 1.0) -> bool:
        return all(v < margin for v in self.ratios(p).values())

    def series(self, p: ParameterPoint, tol: Optional[float] = 1e-12, product_tol: Optional[float] = None) -> TermSeries:
        ptol = tol / 4 if (tol and product_tol is None) else (product_tol or 1e-16)
        q = p.q
        margin = p.pole_margin

        def term(k):
            return as_qterm(self.summand(p, k)).evaluate(q, ptol, margin)

        if self.kind == "terminating":
            return TermSeries(term, "terminating", n=p["n"], tol=None)
        if p.field.is_exact:
            raise ModeError(f"{self.id} is a nonterminating series; use float mode")
        return TermSeries(term, self.kind, tol=tol)

    def evaluate_lhs(self, p: ParameterPoint, tol: float = 1e-12):
        return as_qterm(self.lhs(p)).evaluate(p.q, tol / 4, p.pole_margin)

    def evaluate(self, p: ParameterPoint, tol: float = 1e-12) -> "Evaluation":
        lhs, lhs_err = self.evaluate_lhs(p, tol)
        res = sum_series(self.series(p, tol))
        return Evaluation(lhs, lhs_err, res)

    def perturbed(self, eps: float) -> "IdentityRecord":
        """Copy whose summand is scaled by (1 + eps); used for fault injection."""
        base = self.summand
        return replace(self, summand=lambda p, k: as_qterm(base(p, k)) * (1 + p.field(eps)))


@dataclass(frozen=True)
class Evaluation:
    lhs: object
    lhs_error: float
    series: SeriesResult

    @property
    def rhs(self):
        return self.series.value

    @property
    def residual(self):
        return abs(self.lhs - self.series.value)


_REGISTRY: Dict[str, IdentityRecord] = {}


def register(record: IdentityRecord) -> IdentityRecord:
    if record.id in _REGISTRY:
        raise ValueError(f"duplicate identity id {record.id!r}")
    _REGISTRY[record.id] = record
    return record


def _load():
    from . import classical, curious  # noqa: F401  (registration side effect)


def get(identity_id: str) -> IdentityRecord:
    _load()
    try:
        return _REGISTRY[identity_id]
    except KeyError:
        raise UnknownIdentityError(identity_id) from None


def ids() -> Tuple[str, ...]:
    _load()
    return tuple(_REGISTRY)


def records() -> Iterator[IdentityRecord]:
    _load()
    return iter(tuple(_REGISTRY.values()))
