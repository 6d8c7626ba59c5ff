"""Scalar kernel: arithmetic fields, q-shifted factorials and series summation.

Every numeric quantity flows through one of two fields:

* ``Field.exact()`` -- values are :class:`fractions.Fraction`; nothing is
  rounded and infinite products are refused.
* ``Field.floating(digits)`` -- values are Python ``complex`` for
  ``digits <= 15`` and ``mpmath`` ``mpc`` numbers from a private context
  otherwise.

The functions below are written against the ordinary arithmetic operators so
that the same code path serves both modes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, NamedTuple, Optional, Sequence

import mpmath

from .errors import ModeError, NonconvergenceError, PoleError

Scalar = Any

INTEGER_SYMBOLS = frozenset({"n", "l"})


@functools.lru_cache(maxsize=None)
def _mp_context(digits: int) -> mpmath.MPContext:
    ctx = mpmath.MPContext()
    ctx.dps = digits
    return ctx


@dataclass(frozen=True)
class Field:
    """Arithmetic mode: exact rationals or floating point with ``digits`` digits."""

    mode: str = "float"
    digits: int = 15

    def __post_init__(self):
        if self.mode not in ("exact", "float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "float" and self.digits < 15:
            raise ValueError("float mode needs at least 15 digits")

    @classmethod
    def exact(cls) -> "Field":
        return cls("exact", 0)

    @classmethod
    def floating(cls, digits: int = 15) -> "Field":
        return cls("float", digits)

    @property
    def is_exact(self) -> bool:
        return self.mode == "exact"

    @property
    def eps(self) -> float:
        if self.is_exact:
            return 0.0
        return 2.0**-52 if self.digits <= 15 else 10.0 ** (1 - self.digits)

    def __call__(self, x) -> Scalar:
        if self.is_exact:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, (int, float, str)):
                return Fraction(x)
            if x.imag != 0:
                raise ModeError("exact mode supports rational values only")
            return Fraction(float(x.real))
        if self.digits <= 15:
            if isinstance(x, Fraction):
                return complex(float(x))
            return complex(x)
        ctx = _mp_context(self.digits)
        if isinstance(x, Fraction):
            return ctx.mpc(ctx.mpf(x.numerator) / x.denominator)
        if isinstance(x, str):
            return ctx.mpc(ctx.mpf(Fraction(x).numerator) / Fraction(x).denominator)
        return ctx.mpc(x)

    def describe(self) -> str:
        return "exact" if self.is_exact else f"float({self.digits})"


def field_of(x: Scalar) -> Field:
    """Infer the field a scalar value belongs to."""
    if isinstance(x, (Fraction, int)):
        return Field.exact()
    if isinstance(x, (complex, float)):
        return Field.floating(15)
    if isinstance(x, (mpmath.mpc, mpmath.mpf)) or hasattr(x, "context"):
        return Field.floating(x.context.dps)
    raise TypeError(f"not a scalar: {x!r}")


def is_exact_value(x: Scalar) -> bool:
    return isinstance(x, (Fraction, int))


def check_denominator(x: Scalar, margin: float = 0.0) -> Scalar:
    """Return ``x`` unchanged, raising PoleError if it vanishes or |x| <= margin."""
    if x == 0 or (margin and abs(x) <= margin):
        raise PoleError(f"denominator factor {x!r} vanishes (margin {margin})")
    return x


@dataclass(frozen=True)
class ParameterPoint:
    """A named assignment of values to the symbols of an identity.

    ``params`` holds the continuous parameters (a, b, c, d, e, z), ``ints``
    the integer ones (n, l).  When ``sqrt_a`` is supplied, ``a`` is taken to be
    its square.
    """

    field: Field
    q: Scalar
    params: Mapping[str, Scalar] = field(default_factory=dict)
    ints: Mapping[str, int] = field(default_factory=dict)
    sqrt_a: Optional[Scalar] = None
    pole_margin: float = 0.0

    def __post_init__(self):
        if self.q == 0 or abs(self.q) >= 1:
            raise ValueError("the base must satisfy 0 < |q| < 1")
        if self.sqrt_a is not None and "a" in self.params:
            a = self.params["a"]
            sq = self.sqrt_a * self.sqrt_a
            if self.field.is_exact:
                if sq != a:
                    raise ValueError("sqrt_a**2 != a")
            elif abs(sq - a) > 64 * self.field.eps * max(1.0, abs(a)):
                raise ValueError("sqrt_a**2 != a")

    @classmethod
    def make(cls, field: Field, q, *, sqrt_a=None, pole_margin: float = 0.0, **values) -> "ParameterPoint":
        params, ints = {}, {}
        for name, v in values.items():
            if name in INTEGER_SYMBOLS:
                if int(v) != v:
                    raise ValueError(f"{name} must be an integer")
                ints[name] = int(v)
            else:
                params[name] = field(v)
        return cls(
            field,
            field(q),
            params,
            ints,
            None if sqrt_a is None else field(sqrt_a),
            pole_margin,
        )

    def __getitem__(self, name: str) -> Scalar:
        if name == "q":
            return self.q
        if name in self.ints:
            return self.ints[name]
        if name in self.params:
            return self.params[name]
        if name == "a" and self.sqrt_a is not None:
            return self.sqrt_a * self.sqrt_a
        if name == "sqrt_a" and self.sqrt_a is not None:
            return self.sqrt_a
        raise KeyError(name)

    def get(self, name: str, default=None):
        try:
            return self[name]
        except KeyError:
            return default

    def __contains__(self, name: str) -> bool:
        return self.get(name) is not None

    def with_values(self, **values) -> "ParameterPoint":
        """Return a copy with some symbols substituted (values are converted)."""
        params = dict(self.params)
        ints = dict(self.ints)
        sqrt_a = self.sqrt_a
        q = self.q
        for name, v in values.items():
            if name == "q":
                q = self.field(v)
            elif name == "sqrt_a":
                sqrt_a = self.field(v)
                params.pop("a", None)
            elif name in INTEGER_SYMBOLS:
                ints[name] = int(v)
            else:
                params[name] = self.field(v)
        return replace(self, q=q, params=params, ints=ints, sqrt_a=sqrt_a)

    def den(self, x: Scalar) -> Scalar:
        return check_denominator(x, self.pole_margin)

    def symbols(self) -> dict:
        out = {"q": self.q}
        if self.sqrt_a is not None:
            out["sqrt_a"] = self.sqrt_a
            out["a"] = self["a"]
        out.update(self.params)
        out.update(self.ints)
        return out


# ---------------------------------------------------------------------------
# q-shifted factorials
# ---------------------------------------------------------------------------


def qpoch_finite(a: Scalar, q: Scalar, k: int, margin: float = 0.0) -> Scalar:
    """(a;q)_k for any integer k, via the infinite-product quotient.

    For ``k < 0`` this is ``1 / prod_{j=1}^{-k} (1 - a q^{-j})``; a vanishing
    factor there raises :class:`PoleError`.
    """
    if k >= 0:
        p = 1
        x = a
        for _ in range(k):
            p = p * (1 - x)
            x = x * q
        return p if k else _one_like(a)
    d = _one_like(a)
    x = a / q
    for _ in range(-k):
        d = d * check_denominator(1 - x, margin)
        x = x / q
    return 1 / d


def qpoch_recip(a: Scalar, q: Scalar, k: int, margin: float = 0.0) -> Scalar:
    """1/(a;q)_k; finite (possibly zero) for every negative k."""
    if k >= 0:
        d = _one_like(a)
        x = a
        for _ in range(k):
            d = d * check_denominator(1 - x, margin)
            x = x * q
        return 1 / d
    p = _one_like(a)
    x = a / q
    for _ in range(-k):
        p = p * (1 - x)
        x = x / q
    return p


def qpoch_ratio(
    nums: Sequence[Scalar], dens: Sequence[Scalar], q: Scalar, k: int, margin: float = 0.0
) -> Scalar:
    """prod (n_i;q)_k / prod (d_i;q)_k for any integer k.

    Zero-valued reciprocals (a denominator ``(q;q)_k`` with ``k < 0``) give an
    exact zero instead of an error; only factors that genuinely land in a
    denominator are pole-checked.  Factors are applied index by index so that
    the partial products stay in floating-point range.
    """
    if k >= 0:
        top, bottom, step = list(nums), list(dens), q
    else:
        top, bottom, step = [x / q for x in dens], [x / q for x in nums], 1 / q
    value = _one_like(q)
    for _ in range(abs(k)):
        for i, x in enumerate(top):
            value = value * (1 - x)
            top[i] = x * step
        for i, y in enumerate(bottom):
            value = value / check_denominator(1 - y, margin)
            bottom[i] = y * step
    return value


def _one_like(x: Scalar) -> Scalar:
    if isinstance(x, Fraction):
        return Fraction(1)
    if isinstance(x, int):
        return Fraction(1)
    return x * 0 + 1


class QPochResult(NamedTuple):
    value: Scalar
    tail_bound: float
    terms_used: int


def qpoch_infinite(a: Scalar, q: Scalar, tol: float = 1e-16, margin: float = 0.0) -> QPochResult:
    """(a;q)_inf with a certified truncation bound.

    Past the cutoff J (chosen so that |a||q|^J < 1/2) the neglected factors
    satisfy |log prod_{j>=J}(1-aq^j)| <= L = |a||q|^J / ((1-|q|)(1-|a||q|^J)),
    so the relative error of the partial product is at most expm1(L).  J
    starts at max(20, ceil(log tol / log|q|)) and doubles until
    expm1(L) < tol.  ``tail_bound`` is the resulting absolute bound.
    """
    if is_exact_value(q) or is_exact_value(a):
        raise ModeError("infinite products are unavailable in exact mode")
    aq = float(abs(q))
    if aq >= 1:
        raise NonconvergenceError("(a;q)_inf needs |q| < 1")
    if a == 0:
        return QPochResult(_one_like(q), 0.0, 0)
    aa = float(abs(a))
    J = max(20, math.ceil(math.log(tol) / math.log(aq)))
    value = _one_like(q)
    x = a
    done = 0
    while True:
        for _ in range(J - done):
            f = 1 - x
            if margin:
                check_denominator(f, margin)
            value = value * f
            x = x * q
        done = J
        head = aa * aq**J
        if head < 0.5:
            L = head / ((1 - aq) * (1 - head))
            rel = math.expm1(L)
            if rel < tol:
                return QPochResult(value, float(abs(value)) * rel, J)
        if J > 1 << 20:
            raise NonconvergenceError(f"(a;q)_inf did not reach tol={tol} (a={a}, q={q})")
        J *= 2


def rising_factorial(a: Scalar, k: int) -> Scalar:
    """(a)_k = a (a+1) ... (a+k-1); (a)_0 = 1."""
    if k < 0:
        raise ValueError("rising factorial needs k >= 0")
    p = _one_like(a)
    for i in range(k):
        p = p * (a + i)
    return p


def binomial(x: Scalar, k: int) -> Scalar:
    """Generalised binomial coefficient x(x-1)...(x-k+1)/k!."""
    if k < 0:
        raise ValueError("binomial needs k >= 0")
    p = _one_like(x)
    for i in range(k):
        p = p * (x - i) / (i + 1)
    return p


def qbinom2(k: int) -> int:
    """k(k-1)/2, a nonnegative integer for every integer k."""
    return k * (k - 1) // 2


# ---------------------------------------------------------------------------
# Products of infinite q-shifted factorials
# ---------------------------------------------------------------------------


def _q_power_exponent(r: Scalar, q: Scalar, max_shift: int) -> Optional[int]:
    """Return m in [1, max_shift] with r == q**m, else None (exact values only)."""
    p = q
    for m in range(1, max_shift + 1):
        if r == p:
            return m
        p = p * q
    return None


@dataclass(frozen=True)
class QTerm:
    """coef * prod (x;q)_inf over ``num`` / prod (y;q)_inf over ``den``.

    Keeping the infinite products symbolic lets exact mode cancel them (or
    collapse pairs whose arguments differ by a power of q to finite
    products) before any value is required.
    """

    coef: Scalar
    num: tuple = ()
    den: tuple = ()

    def __mul__(self, other):
        if isinstance(other, QTerm):
            return QTerm(self.coef * other.coef, self.num + other.num, self.den + other.den)
        return QTerm(self.coef * other, self.num, self.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QTerm):
            return QTerm(self.coef / other.coef, self.num + other.den, self.den + other.num)
        return QTerm(self.coef / other, self.num, self.den)

    def __rtruediv__(self, other):
        return QTerm(other / self.coef, self.den, self.num)

    @property
    def is_finite(self) -> bool:
        return not self.num and not self.den

    def reduced(self, q: Scalar, max_shift: int = 64) -> "QTerm":
        """Cancel infinite products exactly (exact arithmetic only).

        (x;q)_inf / (x q^m;q)_inf becomes (x;q)_m and the reverse ratio becomes
        1/(y;q)_m.  Arguments equal to zero contribute 1.
        """
        coef = self.coef
        num = [x for x in self.num if x != 0]
        den = [y for y in self.den if y != 0]
        changed = True
        while changed:
            changed = False
            for i, x in enumerate(num):
                for j, y in enumerate(den):
                    if x == y:
                        factor = 1
                    elif x != 0 and y != 0 and (m := _q_power_exponent(y / x, q, max_shift)):
                        factor = qpoch_finite(x, q, m)
                    elif x != 0 and y != 0 and (m := _q_power_exponent(x / y, q, max_shift)):
                        factor = 1 / check_denominator(qpoch_finite(y, q, m))
                    else:
                        continue
                    coef = coef * factor
                    del num[i]
                    del den[j]
                    changed = True
                    break
                if changed:
                    break
        return QTerm(coef, tuple(num), tuple(den))

    def exact_value(self, q: Scalar) -> Scalar:
        t = self.reduced(q)
        if not t.is_finite:
            if any(x == 1 or (_q_power_exponent(1 / x, q, 64) if x else None) for x in t.num) and not t.den:
                return 0 * t.coef
            raise ModeError("term retains infinite products that do not cancel exactly")
        return t.coef

    def evaluate(self, q: Scalar, tol: float = 1e-16, margin: float = 0.0):
        """Return (value, absolute error bound) in floating point."""
        if is_exact_value(q):
            return self.exact_value(q), 0.0
        value = self.coef
        rel = 0.0
        for x in self.num:
            r = qpoch_infinite(x, q, tol)
            value = value * r.value
            rel += r.tail_bound / float(abs(r.value)) if r.value != 0 else 0.0
        for y in self.den:
            r = qpoch_infinite(y, q, tol, margin)
            value = value / check_denominator(r.value, 0.0)
            rel += r.tail_bound / float(abs(r.value))
        return value, float(abs(value)) * rel * 1.01


def as_qterm(x) -> QTerm:
    return x if isinstance(x, QTerm) else QTerm(x)


def qinf_ratio(nums: Iterable[Scalar], dens: Iterable[Scalar]) -> QTerm:
    return QTerm(1, tuple(nums), tuple(dens))


# ---------------------------------------------------------------------------
# Series summation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TermSeries:
    """A summand over integer k plus its summation policy.

    ``kind`` is ``"terminating"`` (sum k = 0..n exactly), ``"unilateral"``
    (k >= 0) or ``"bilateral"`` (all integers).  With ``tol=None`` a
    terminating series is summed as is; otherwise the adaptive ratio test is
    used for the infinite kinds.  The summand may return a scalar or a
    ``(value, error_bound)`` pair.
    """

    summand: Callable[[int], Any]
    kind: str = "unilateral"
    n: Optional[int] = None
    tol: Optional[float] = 1e-12
    rho_max: float = 0.99
    k_min: int = 8
    k_max: int = 20000


class SeriesResult(NamedTuple):
    value: Scalar
    tail_bound: float
    terms_used: int
    abs_sum: float


def _split(t):
    if isinstance(t, tuple):
        return t
    return t, 0.0


class _Side:
    """Adaptive state for one direction of summation."""

    def __init__(self, summand, start, step, series: TermSeries):
        self.summand = summand
        self.k = start
        self.step = step
        self.s = series
        self.total = 0
        self.abs_sum = 0.0
        self.err = 0.0
        self.mags: list = []
        self.count = 0
        self.tail = math.inf

    def advance(self):
        t, e = _split(self.summand(self.k))
        self.total = self.total + t
        m = float(abs(t))
        self.abs_sum += m
        self.err += e
        self.mags.append(m)
        self.k += self.step
        self.count += 1

    def tail_estimate(self) -> Optional[float]:
        """Geometric tail bound from the last five ratios, None if not yet geometric."""
        if self.count < self.s.k_min:
            return None
        last = self.mags[-6:]
        if all(m == 0 for m in last):
            return 0.0
        ratios = []
        for prev, cur in zip(last, last[1:]):
            if prev == 0:
                if cur != 0:
                    return None
                ratios.append(0.0)
            else:
                ratios.append(cur / prev)
        rho = max(ratios)
        if rho >= self.s.rho_max:
            return None
        return last[-1] * rho / (1 - rho)

    def diverging(self) -> bool:
        """Terms have grown monotonically over the last 16 steps."""
        if self.count < 4 * self.s.k_min:
            return False
        last = self.mags[-17:]
        return all(prev > 0 and cur > prev for prev, cur in zip(last, last[1:]))


def sum_series(s: TermSeries) -> SeriesResult:
    """Sum a TermSeries according to its policy.

    Terminating: exact sum over 0..n.  Adaptive: each side is extended until
    its geometric tail estimate is below tol/4 relative to the running sum;
    the side that decays more slowly simply takes more terms.
    """
    if s.kind == "terminating":
        if s.n is None:
            raise ValueError("terminating series needs n")
        total = 0
        err = 0.0
        abs_sum = 0.0
        for k in range(s.n + 1):
            t, e = _split(s.summand(k))
            total = total + t
            err += e
            abs_sum += float(abs(t))
        return SeriesResult(total, err, s.n + 1, abs_sum)
    if s.tol is None:
        raise ModeError("infinite series need an adaptive tolerance")
    sides = [_Side(s.summand, 0, 1, s)]
    if s.kind == "bilateral":
        sides.append(_Side(s.summand, -1, -1, s))
    elif s.kind != "unilateral":
        raise ValueError(f"unknown series kind {s.kind!r}")
    for side in sides:
        for _ in range(s.k_min):
            side.advance()
    while True:
        value = sum((side.total for side in sides), 0)
        scale = max(float(abs(value)), 1e-300)
        pending = []
        for side in sides:
            tail = side.tail_estimate()
            side.tail = math.inf if tail is None else tail
            if tail is None or tail >= s.tol / 4 * scale:
                pending.append(side)
        if not pending:
            break
        for side in pending:
            if side.diverging():
                raise NonconvergenceError(f"series terms grow without bound (k = {side.k})")
            if side.count >= s.k_max:
                raise NonconvergenceError(
                    f"series tail ratio did not drop below {s.rho_max} within {s.k_max} terms"
                )
            for _ in range(4):
                side.advance()
    value = sum((side.total for side in sides), 0)
    bound = sum(side.tail + side.err for side in sides)
    return SeriesResult(
        value, bound, sum(side.count for side in sides), sum(side.abs_sum for side in sides)
    )
