"""Lower-triangular matrix inverses and inverse relations.

Three explicit inverse pairs are provided: Krattenthaler's general inverse and
its two non-q-hypergeometric specialisations (the ``cor1`` and ``cor2``
forms).  Verification is always on finite windows ``(l, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

from .errors import DegenerateInputError, NonconvergenceError
from .qcore import qbinom2, qpoch_finite, qpoch_ratio


@dataclass(frozen=True)
class InversePair:
    """Entry generators f(n, k) and g(k, l) of two lower-triangular matrices.

    Entries are only requested with ``n >= k`` (resp. ``k >= l``); the
    upper triangle is zero by definition.
    """

    name: str
    f: Callable[[int, int], object]
    g: Callable[[int, int], object]
    ctx: Dict[str, object]
    lower_triangular: bool = True

    def F(self, n: int, k: int):
        return self.f(n, k) if n >= k else 0

    def G(self, k: int, l: int):
        return self.g(k, l) if k >= l else 0


def _nz(x, what: str):
    if x == 0:
        raise DegenerateInputError(f"vanishing factor: {what}")
    return x


def krattenthaler_pair(a_seq: Callable[[int], object], c_seq: Callable[[int], object], d) -> InversePair:
    """The general inverse pair built from sequences a_j, c_j and a scalar d."""

    def f(n, k):
        ck = _nz(c_seq(k), f"c_{k}")
        num = ck * 0 + 1
        for j in range(k, n):
            aj = a_seq(j)
            num = num * (aj - d / ck) * (aj - ck)
        den = ck * 0 + 1
        for j in range(k + 1, n + 1):
            cj = c_seq(j)
            den = den * _nz((cj - d / ck) * (cj - ck), f"(c_{j} - d/c_{k})(c_{j} - c_{k})")
        return num / den

    def g(k, l):
        ck = _nz(c_seq(k), f"c_{k}")
        al, cl = a_seq(l), c_seq(l)
        ak = a_seq(k)
        pre = (al * cl - d) * (al - cl) / _nz((ak * ck - d) * (ak - ck), f"(a_{k}c_{k} - d)(a_{k} - c_{k})")
        num = ck * 0 + 1
        for j in range(l + 1, k + 1):
            aj = a_seq(j)
            num = num * (aj - d / ck) * (aj - ck)
        den = ck * 0 + 1
        for j in range(l, k):
            cj = c_seq(j)
            den = den * _nz((cj - d / ck) * (cj - ck), f"(c_{j} - d/c_{k})(c_{j} - c_{k})")
        return pre * num / den

    return InversePair("krattenthaler", f, g, {"a_seq": a_seq, "c_seq": c_seq, "d": d})


def cor1_sequences(a, b, c, q):
    """The specialisation a_j = (1-bc)/(1-acq^j), c_j = 1 - c q^-j, d = 1 - bc."""
    return (
        lambda j: (1 - b * c) / _nz(1 - a * c * q**j, f"1 - acq^{j}"),
        lambda j: 1 - c * q**-j,
        1 - b * c,
    )


def _mix(b, c, q, k):
    m1 = 1 - b * q**k
    m2 = c - q**k
    _nz(m1, f"1 - bq^{k}")
    _nz(m2, f"c - q^{k}")
    return m1 / m2, m2 / m1


def cor1_pair(a, b, c, q) -> InversePair:
    """The first (``cor1``) specialisation, with factors arranged as printed."""

    def f(n, k):
        r, ri = _mix(b, c, q, k)
        _, ri_n = _mix(b, c, q, n)
        t = (1 - b * q**n) / (1 - b * q**k) * r**n
        t *= (1 - ri_n * a * q**n) / _nz(1 - ri * a, "1 - a(c-q^k)/(1-bq^k)")
        t *= (1 - r * q**k) / _nz(1 - r, "1 - R(k)") * q**k
        t *= qpoch_ratio([q**-n, a * q**n], [q, a * q], q, k)
        t *= qpoch_ratio([ri * a], [r * q], q, n)
        return t

    def g(k, l):
        r, ri = _mix(b, c, q, k)
        t = ri**l * q ** (k * l) * (1 - a * q ** (2 * l)) / _nz(1 - a, "1 - a")
        t *= qpoch_ratio([a, q**-k], [q, a * q ** (1 + k)], q, l)
        t *= qpoch_ratio([r], [ri * a * q], q, l)
        return t

    return InversePair("cor1", f, g, {"a": a, "b": b, "c": c, "q": q})


def cor2_pair(a, b, c, q) -> InversePair:
    """The second (``cor2``) form, differing from cor1 by a diagonal transfer."""

    def f(n, k):
        r, ri = _mix(b, c, q, k)
        m = n - k
        t = (r * q**-k) ** m
        t *= (1 - a * q ** (2 * n)) / _nz(1 - a * q ** (2 * k), f"1 - aq^{2 * k}")
        t *= qpoch_ratio([a * q ** (2 * k), ri * a * q**k], [q, r * q ** (1 + k)], q, m)
        return t

    def g(k, l):
        r, ri = _mix(b, c, q, k)
        rl, ri_l = _mix(b, c, q, l)
        sign = -1 if (k - l) % 2 else 1
        t = sign * q ** (qbinom2(l) - qbinom2(k))
        t *= qpoch_finite(a * q, q, 2 * k) / _nz(
            qpoch_finite(q, q, k - l) * qpoch_finite(a * q, q, k + l), "(q;q)_{k-l}(aq;q)_{k+l}"
        )
        t *= (1 - b * q**l) / (1 - b * q**k) * r ** (k - l)
        t *= (1 - ri_l * a * q**l) / _nz(1 - ri * a * q**k, "1 - aq^k (c-q^k)/(1-bq^k)")
        t *= qpoch_ratio([ri * a * q], [r], q, k)
        t *= qpoch_ratio([r], [ri * a * q], q, l)
        return t

    return InversePair("cor2", f, g, {"a": a, "b": b, "c": c, "q": q})


# ---------------------------------------------------------------------------
# Orthogonality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OrthogonalityReport:
    window: tuple
    max_offdiag: float
    diag_dev: float
    exact: bool
    dual_max_offdiag: float = 0.0
    dual_diag_dev: float = 0.0
    scale: float = 1.0  # largest sum of |f g| over the window, for float comparisons

    @property
    def passed(self) -> bool:
        return self.exact

    def within(self, tol: float) -> bool:
        """Deviations below tol relative to max(1, scale)."""
        worst = max(self.max_offdiag, self.diag_dev, self.dual_max_offdiag, self.dual_diag_dev)
        return worst < tol * max(1.0, self.scale)


def _entries(fn, l, n):
    return {(i, j): fn(i, j) for i in range(l, n + 1) for j in range(l, i + 1)}


def verify_orthogonality(p: InversePair, l: int, n: int, mode: str = "exact") -> OrthogonalityReport:
    """Check sum_k f(n,k) g(k,l) = delta and sum_k g(n,k) f(k,l) = delta on a window.

    Every pair (n', l') with l <= l' <= n' <= n is checked, in both
    orientations.  In exact mode ``exact`` is True only if all sums are
    identically the Kronecker delta.
    """
    if n < l:
        raise ValueError("window needs n >= l")
    F = _entries(p.f, l, n)
    G = _entries(p.g, l, n)

    scale = 0.0

    def scan(A, B):
        nonlocal scale
        offdiag = 0.0
        diag = 0.0
        ok = True
        for hi in range(l, n + 1):
            for lo in range(l, hi + 1):
                prods = [A[hi, k] * B[k, lo] for k in range(lo, hi + 1)]
                s = sum(prods, 0)
                scale = max(scale, sum(float(abs(x)) for x in prods))
                target = 1 if hi == lo else 0
                dev = s - target
                if dev != 0:
                    ok = False
                if hi == lo:
                    diag = max(diag, float(abs(dev)))
                else:
                    offdiag = max(offdiag, float(abs(dev)))
        return offdiag, diag, ok

    off, dg, ok1 = scan(F, G)
    doff, ddg, ok2 = scan(G, F)
    return OrthogonalityReport((l, n), off, dg, mode == "exact" and ok1 and ok2, doff, ddg, scale)


def diagonal_transfer(source: InversePair, target: InversePair, l: int, n: int):
    """Reconstruct u, v with target.f(i,j) = u_i source.f(i,j) v_j on a window.

    Returns ``(u, v, consistent)`` where ``consistent`` states that the ratio
    matrix has exactly this rank-one form and that
    target.g(i,j) = source.g(i,j) / (v_i u_j) -- i.e. the two pairs differ
    only by moving one diagonal matrix from one factor to the other.
    """
    ratio = {}
    for i in range(l, n + 1):
        for j in range(l, i + 1):
            ratio[i, j] = target.f(i, j) / _nz(source.f(i, j), f"source f({i},{j})")
    u = {i: ratio[i, l] / ratio[l, l] for i in range(l, n + 1)}
    v = {j: ratio[j, j] / u[j] for j in range(l, n + 1)}
    ok = all(ratio[i, j] == u[i] * v[j] for (i, j) in ratio)
    for i in range(l, n + 1):
        for j in range(l, i + 1):
            if target.g(i, j) * v[i] * u[j] != source.g(i, j):
                ok = False
    return u, v, ok


def worked_product(a, b, c, q, k: int, l: int):
    """Both sides of the closed form of prod_{j=l+1}^k (a_j - c_k) for the cor1 sequences."""
    a_seq, c_seq, _ = cor1_sequences(a, b, c, q)
    ck = c_seq(k)
    direct = 1
    for j in range(l + 1, k + 1):
        direct = direct * (a_seq(j) - ck)
    m = k - l
    qk = q**k
    closed = (c * (1 - b * qk) / qk) ** m * qpoch_ratio(
        [(c - qk) / (1 - b * qk) * a * q ** (1 + l)], [a * c * q ** (1 + l)], q, m
    )
    return direct, closed


# ---------------------------------------------------------------------------
# Inverse relations
# ---------------------------------------------------------------------------

DIRECTIONS = ("inv_f", "inv_g", "rotinv_f", "rotinv_g")


def apply_inverse_relation(
    p: InversePair,
    seq,
    direction: str,
    indices: Sequence[int],
    *,
    tol: float = 1e-13,
    max_terms: int = 2000,
    start: int = 0,
) -> List:
    """Transform a sequence through one of the four inverse relations.

    ``inv_f``:     b_n = sum_{k=start}^{n} f(n,k) a_k
    ``inv_g``:     a_k = sum_{l=start}^{k} g(k,l) b_l
    ``rotinv_f``:  b_k = sum_{n>=k} f(n,k) a_n
    ``rotinv_g``:  a_l = sum_{k>=l} g(k,l) b_k

    ``seq`` is a callable index -> value or a sequence indexed from
    ``start``.  The infinite (rotinv) sums stop once three consecutive terms
    each change the partial sum by less than tol/10 relative.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    at = seq if callable(seq) else (lambda i: seq[i - start])
    out = []
    for idx in indices:
        if direction == "inv_f":
            out.append(sum((p.f(idx, k) * at(k) for k in range(start, idx + 1)), 0))
        elif direction == "inv_g":
            out.append(sum((p.g(idx, l) * at(l) for l in range(start, idx + 1)), 0))
        else:
            entry = p.f if direction == "rotinv_f" else p.g
            out.append(_rot_sum(lambda m: entry(m, idx) * at(m), idx, tol, max_terms))
    return out


def _rot_sum(term, first: int, tol: float, max_terms: int):
    total = 0
    quiet = 0
    mags = []
    for m in range(first, first + max_terms):
        t = term(m)
        total = total + t
        mag = float(abs(t))
        mags.append(mag)
        if mag <= tol / 10 * max(float(abs(total)), 1e-300):
            quiet += 1
            if quiet >= 3:
                return total
        else:
            quiet = 0
    raise NonconvergenceError(f"inverse-relation tail does not decay after {max_terms} terms")
