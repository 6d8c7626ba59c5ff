"""The non-hypergeometric ("curious") summations.

The q-versions share the mixing ratio ``R(k) = (1 - b q^k)/(c - q^k)``.  It
changes non-hypergeometrically with k, so every summand below is rebuilt
from scratch for each k instead of by a term-ratio recurrence.
"""

from __future__ import annotations

import math
from typing import Optional

from .errors import DegenerateInputError, PoleError, UnknownIdentityError
from .qcore import (
    Field,
    ParameterPoint,
    QTerm,
    as_qterm,
    binomial,
    qpoch_finite,
    qpoch_ratio,
    TermSeries,
    rising_factorial,
    sum_series,
)
from .registry import Degeneration, IdentityRecord, get, register


def _abs(x) -> float:
    return float(abs(x))


def mixing(p, k):
    """Return (M1, M2, R, 1/R) at index k with M1 = 1 - b q^k, M2 = c - q^k."""
    qk = p.q**k
    m1 = 1 - p["b"] * qk
    m2 = p["c"] - qk
    if m2 == 0:
        raise DegenerateInputError(f"c = q^{k}")
    if m1 == 0:
        raise PoleError(f"b q^{k} = 1")
    p.den(m1)
    p.den(m2)
    return m1, m2, m1 / m2, m2 / m1


# --- q = 1 identities ---------------------------------------------------------


def _abel_summand(p, k):
    a, b, c, n = p["a"], p["b"], p["c"], p["n"]
    if a == 0:
        raise DegenerateInputError("Abel's sum needs a != 0")
    return binomial(p.field(n), k) * a * (a + b * k) ** (k - 1) * (c - b * k) ** (n - k)


def _rothe_summand(p, k):
    a, b, c, n = p["a"], p["b"], p["c"], p["n"]
    base = a + b * k
    if base == 0:
        raise DegenerateInputError(f"a + b*{k} = 0")
    return a / base * binomial(base, k) * binomial(c - b * k, n - k)


ABEL = register(
    IdentityRecord(
        id="abel",
        title="Abel's summation",
        params_required=("a", "b", "c", "n"),
        lhs=lambda p: (p["a"] + p["c"]) ** p["n"],
        summand=_abel_summand,
        kind="terminating",
        exact_capable=True,
        degenerations=(Degeneration("binomial", "b = 0", lambda t: (t.with_values(b=0), t)),),
    )
)

HAGEN_ROTHE = register(
    IdentityRecord(
        id="hagen_rothe",
        title="Hagen-Rothe summation",
        params_required=("a", "b", "c", "n"),
        lhs=lambda p: binomial(p["a"] + p["c"], p["n"]),
        summand=_rothe_summand,
        kind="terminating",
        exact_capable=True,
        degenerations=(
            Degeneration("chu_vandermonde", "b = 0", lambda t: (t.with_values(b=0), t)),
        ),
    )
)


def _curious_ps_summand(p, k):
    a, b, c, n = p["a"], p["b"], p["c"], p["n"]
    ak = a + k
    if ak == 0:
        raise DegenerateInputError(f"a + {k} = 0")
    x = a + b / ak
    rf = rising_factorial
    one = p.field(1)
    if k == 0:
        lead = p.field(1)  # both prefactors are X/X at k = 0
    else:
        lead = (b + (a - c) * a) / p.den(b + (a - c) * ak) * (b + ak * ak) / p.den(b + a * ak)
    top = rf(p.field(-n), k) * rf(c, k) * rf(x - c, k) * rf(x + c + 1, n)
    bottom = rf(one, k) * rf(-c - n, k) * rf(x + c + 1, k) * rf(x + 1, n)
    if bottom == 0:
        raise DegenerateInputError(f"vanishing shifted factorial at k={k}")
    return lead * top / p.den(bottom)


def _curious_ps_lhs(p):
    c, n = p["c"], p["n"]
    return rising_factorial(2 * c + 1, n) / p.den(rising_factorial(c + 1, n))


CURIOUS_PS = register(
    IdentityRecord(
        id="curious_ps",
        title="curious Pfaff-Saalschuetz dual",
        params_required=("a", "b", "c", "n"),
        lhs=_curious_ps_lhs,
        summand=_curious_ps_summand,
        kind="terminating",
        exact_capable=True,
    )
)


def _curious_qps_summand(p, k):
    q, a, b, c, n = p.q, p["a"], p["b"], p["c"], p["n"]
    u = a - q**-k
    if u == 0:
        raise DegenerateInputError(f"a = q^-{k}")
    w = (b + a * u) / u
    if k == 0:
        lead = p.field(1)
    else:
        lead = (b + (a - c) * (a - 1)) / p.den(b + (a - c) * u) * (b + u * u) / p.den(b + (a - 1) * u)
    m = p.pole_margin
    body = qpoch_ratio([q**-n, c, w / c], [q, q**-n / c, c * q * w], q, k, m)
    tail = qpoch_ratio([c * q * w], [q * w], q, n, m)
    return lead * body * tail * q**k


def _curious_qps_lhs(p):
    q, c, n = p.q, p["c"], p["n"]
    return qpoch_ratio([c * c * q], [c * q], q, n, p.pole_margin)


CURIOUS_QPS = register(
    IdentityRecord(
        id="curious_qps",
        title="curious q-Pfaff-Saalschuetz dual",
        params_required=("a", "b", "c", "n"),
        lhs=_curious_qps_lhs,
        summand=_curious_qps_summand,
        kind="terminating",
        exact_capable=True,
    )
)


def _curious_nt_summand(p, k):
    q, a, b, c = p.q, p["a"], p["b"], p["c"]
    v = a + b * q**k
    if k == 0:
        lead = p.field(1)
    else:
        lead = (c - (a + 1) * (a + b)) / p.den(c - (a + 1) * v) * (c - v * v) / p.den(c - (a + b) * v)
    y = v / p.den(c - a * v)
    body = qpoch_ratio([b, y], [q], q, k, p.pole_margin)
    return QTerm(lead * body * (b * q) ** k, (y * b * b * q ** (k + 1),), (y * b * q,))


CURIOUS_NT = register(
    IdentityRecord(
        id="curious_nt",
        title="curious nonterminating q-Gauss dual",
        params_required=("a", "b", "c"),
        lhs=lambda p: QTerm(1, (p["b"] ** 2 * p.q,), (p["b"] * p.q,)),
        summand=_curious_nt_summand,
        kind="unilateral",
        domain_text="|bq| < 1",
        ratios=lambda p: {"|bq|": _abs(p["b"] * p.q)},
    )
)


# --- the new summations ----------------------------------------------------------


def _ts_summand(p, k):
    q, a, b, c, d, n = p.q, p["a"], p["b"], p["c"], p["d"], p["n"]
    m1, m2, r, ri = mixing(p, k)
    m1n, m2n, _, ri_n = mixing(p, n)
    qk = q**k
    m = p.pole_margin
    t = m1n / m1 * r**n
    t *= qpoch_ratio([q**-n, a * q**n], [q, a * d], q, k, m)
    t *= (1 - ri_n * a * q**n) / p.den(1 - ri * a * qk)
    t *= (1 - r * qk) / p.den(1 - r)
    t *= qpoch_ratio([ri * a * d], [ri * a], q, k, m)
    t *= qpoch_ratio([ri * a], [r * q], q, n, m)
    return t * qk


def _ts_lhs(p):
    q, a, d, n = p.q, p["a"], p["d"], p["n"]
    return qpoch_ratio([q / d], [a * d], q, n, p.pole_margin) * (a * d) ** n


def _tns_summand(p, k):
    q, a, d = p.q, p["a"], p["d"]
    m1, m2, r, ri = mixing(p, k)
    m = p.pole_margin
    t = r**k / m1 * (1 - r * q**k)
    t *= qpoch_ratio([q / d], [q, a * q], q, k, m)
    t *= qpoch_finite(ri * a * q, q, k - 1, m)
    return QTerm(t * d**k, (r * d,), (r,))


def _tns_lhs(p):
    q, a, b, c, d = p.q, p["a"], p["b"], p["c"], p["d"]
    pre = 1 - b + a * (1 - c)
    if pre == 0:
        raise PoleError("1 - b + a(1 - c) = 0")
    return QTerm(1 / p.den(pre), (a * d,), (a * q,))


def _tnsc_summand(p, k):
    q, a, d = p.q, p["a"], p["d"]
    m1, m2, r, ri = mixing(p, k)
    m = p.pole_margin
    t = r**k / m2 * (1 - r * q**k)
    t *= qpoch_ratio([1 / d], [q, a * q], q, k, m)
    t *= qpoch_finite(ri * a * q, q, k, m)
    return QTerm(t * d**k, (r * d * q,), (r,))


def _tnsc_lhs(p):
    q, a, c, d = p.q, p["a"], p["c"], p["d"]
    if c == d:
        raise PoleError("c = d")
    return QTerm(1 / p.den(c - d), (a * d * q,), (a * q,))


def _bns_summand(p, k):
    q, d, e = p.q, p["d"], p["e"]
    m1, m2, r, ri = mixing(p, k)
    t = (1 - r * q**k) / m1
    t *= qpoch_ratio([q / d], [e * q], q, k, p.pole_margin)
    return QTerm(t * (r * d) ** k, (r * d, ri * e * q), (r, ri * q))


def _bns_lhs(p):
    q, b, d, e = p.q, p["b"], p["d"], p["e"]
    if e == b:
        raise PoleError("e = b")
    return QTerm(1 / p.den(e - b), (q, d * e), (d, e * q))


def _bnsc_summand(p, k):
    q, d, e = p.q, p["d"], p["e"]
    m1, m2, r, ri = mixing(p, k)
    t = (1 - r * q**k) / m2
    t *= qpoch_ratio([1 / d], [e * q], q, k, p.pole_margin)
    return QTerm(t * (r * d) ** k, (r * d * q, ri * e * q), (r, ri * q))


def _bnsc_lhs(p):
    q, c, d, e = p.q, p["c"], p["d"], p["e"]
    if c == d:
        raise PoleError("c = d")
    return QTerm(1 / p.den(c - d), (q, d * e * q), (d * q, e * q))


def _dc(p):
    return {"|d/c|": _abs(p["d"] / p["c"])}


def _dc_eb(p):
    return {"|d/c|": _abs(p["d"] / p["c"]), "|e/b|": _abs(p["e"] / p["b"])}


# c = 1/b collapses R(k) to the constant b.


def _ts_to_qps(t):
    """q-PS (A, B, C, n): a = A q^-n, d = C/a, b = a d/B."""
    q, n = t.q, t["n"]
    a = t["a"] * q**-n
    d = t["c"] / a
    b = a * d / t["b"]
    return t.with_values(a=a, b=b, c=1 / b, d=d), t


def _tns_to_qgauss(t):
    """q-Gauss (A, B, C): a = C/q, d = q/A, b = a/B."""
    q = t.q
    a = t["c"] / q
    d = q / t["a"]
    b = a / t["b"]
    return t.with_values(a=a, b=b, c=1 / b, d=d), t


def _tnsc_to_qgauss(t):
    """q-Gauss (A, B, C): a = C/q, d = 1/A, b = a q/B."""
    q = t.q
    a = t["c"] / q
    d = 1 / t["a"]
    b = a * q / t["b"]
    return t.with_values(a=a, b=b, c=1 / b, d=d), t


def _bns_to_1psi1(t):
    """1psi1 (A, B, z): d = q/A, e = B/q, b = z/d."""
    q = t.q
    d = q / t["a"]
    e = t["b"] / q
    b = t["z"] / d
    return t.with_values(b=b, c=1 / b, d=d, e=e), t


def _bnsc_to_1psi1(t):
    """1psi1 (A, B, z): d = 1/A, e = B/q, b = z/d."""
    q = t.q
    d = 1 / t["a"]
    e = t["b"] / q
    b = t["z"] / d
    return t.with_values(b=b, c=1 / b, d=d, e=e), t


THM_TS = register(
    IdentityRecord(
        id="thm_ts",
        title="curious terminating summation (inverse of the 6phi5 sum)",
        params_required=("a", "b", "c", "d", "n"),
        lhs=_ts_lhs,
        summand=_ts_summand,
        kind="terminating",
        exact_capable=True,
        degenerations=(Degeneration("qps", "c = 1/b", _ts_to_qps, normalized=True),),
    )
)

THM_TNS = register(
    IdentityRecord(
        id="thm_tns",
        title="curious nonterminating summation (inverse of the 5phi5 sum)",
        params_required=("a", "b", "c", "d"),
        lhs=_tns_lhs,
        summand=_tns_summand,
        kind="unilateral",
        domain_text="|d/c| < 1",
        ratios=_dc,
        degenerations=(Degeneration("qgauss", "c = 1/b", _tns_to_qgauss, normalized=True),),
    )
)

THM_TNSC = register(
    IdentityRecord(
        id="thm_tnsc",
        title="curious nonterminating summation, contiguous form",
        params_required=("a", "b", "c", "d"),
        lhs=_tnsc_lhs,
        summand=_tnsc_summand,
        kind="unilateral",
        domain_text="|d/c| < 1",
        ratios=_dc,
        degenerations=(Degeneration("qgauss", "c = 1/b", _tnsc_to_qgauss, normalized=True),),
    )
)

THM_BNS = register(
    IdentityRecord(
        id="thm_bns",
        title="curious bilateral extension of the 1psi1 sum",
        params_required=("b", "c", "d", "e"),
        lhs=_bns_lhs,
        summand=_bns_summand,
        kind="bilateral",
        domain_text="|d/c| < 1 and |e/b| < 1",
        ratios=_dc_eb,
        degenerations=(
            Degeneration(
                "thm_tns",
                "e = 1 (target taken at a = 0)",
                lambda t: (t.with_values(e=1), t),
                fixed=(("a", 0),),
            ),
            Degeneration("1psi1", "c = 1/b", _bns_to_1psi1, normalized=True, k_range=(-8, 8)),
        ),
    )
)

THM_BNSC = register(
    IdentityRecord(
        id="thm_bnsc",
        title="curious bilateral extension of the 1psi1 sum, contiguous form",
        params_required=("b", "c", "d", "e"),
        lhs=_bnsc_lhs,
        summand=_bnsc_summand,
        kind="bilateral",
        domain_text="|d/c| < 1 and |e/b| < 1",
        ratios=_dc_eb,
        degenerations=(
            Degeneration(
                "thm_tnsc",
                "e = 1 (target taken at a = 0)",
                lambda t: (t.with_values(e=1), t),
                fixed=(("a", 0),),
            ),
            Degeneration("1psi1", "c = 1/b", _bnsc_to_1psi1, normalized=True, k_range=(-8, 8)),
        ),
    )
)


def id_abel():
    return ABEL


def id_hagen_rothe():
    return HAGEN_ROTHE


def id_curious_ps():
    return CURIOUS_PS


def id_curious_qps():
    return CURIOUS_QPS


def id_curious_nt():
    return CURIOUS_NT


def id_thm_ts():
    return THM_TS


def id_thm_tns():
    return THM_TNS


def id_thm_tnsc():
    return THM_TNSC


def id_thm_bns():
    return THM_BNS


def id_thm_bnsc():
    return THM_BNSC


# --- limit probes ----------------------------------------------------------------


def _ts_to_65s(t):
    q, s, n = t.q, t["sqrt_a"], t["n"]
    a = t["b"] * q**-n
    return {"a": a, "d": s * s * q / (a * t["c"]), "n": n}


def _tns_to_55ns(t):
    s = t["sqrt_a"]
    return {"a": s * s / t["b"], "d": t.q / t["c"]}


def _tnsc_to_55ns(t):
    s = t["sqrt_a"]
    return {"a": s * s / t["b"], "d": 1 / t["c"]}


def _bns_to_46s(t):
    s = t["sqrt_a"]
    return {"e": s * s / t["b"], "d": t.q / t["c"]}


def _bnsc_to_46s(t):
    s = t["sqrt_a"]
    return {"e": s * s / t["b"], "d": 1 / t["c"]}


# (source, target) -> map from a target point to the source's fixed parameters.
# The source is then taken at b = B, c = -B / a_target.
LIMIT_MAPS = {
    ("thm_ts", "65s"): _ts_to_65s,
    ("thm_tns", "55ns"): _tns_to_55ns,
    ("thm_tnsc", "55ns"): _tnsc_to_55ns,
    ("thm_bns", "46s"): _bns_to_46s,
    ("thm_bnsc", "46s"): _bnsc_to_46s,
}

_DEFAULT_TARGETS = {
    "65s": dict(sqrt_a=0.3, b=0.7, c=0.45, n=4),
    "55ns": dict(sqrt_a=0.3, b=0.7, c=1.3),
    "46s": dict(sqrt_a=0.3, b=0.7, c=1.3),
}


def _normalized_terms(record, p, ks):
    q = p.q
    lhs = as_qterm(record.lhs(p)).evaluate(q, 1e-17)[0]
    return [as_qterm(record.summand(p, k)).evaluate(q, 1e-17)[0] / lhs for k in ks]


def vwp_limit_probe(source, target, B: float, q: float = 0.5, point: Optional[dict] = None) -> float:
    """Max termwise deviation between the source at c -> -B/c, b = B and the target.

    Both sides are compared as summand/lhs, so constant factors that the
    limit moves between the two sides drop out.  The deviation is O(1/B).
    """
    src = source if isinstance(source, str) else source.id
    tgt = target if isinstance(target, str) else target.id
    try:
        to_source = LIMIT_MAPS[src, tgt]
    except KeyError:
        raise UnknownIdentityError(f"no limit map {src} -> {tgt}") from None
    src_rec, tgt_rec = get(src), get(tgt)
    field = Field.floating()
    values = dict(_DEFAULT_TARGETS[tgt] if point is None else point)
    s = values.pop("sqrt_a")
    tp = ParameterPoint.make(field, q, sqrt_a=s, **values)
    big = field(B)
    sp = ParameterPoint.make(field, q, b=big, c=-big / tp["a"], **to_source(tp))
    ks = range(-8, 9) if tgt_rec.kind == "bilateral" else range(0, 9)
    if tgt_rec.kind == "terminating":
        ks = range(0, tp["n"] + 1)
    lhs_terms = _normalized_terms(src_rec, sp, ks)
    rhs_terms = _normalized_terms(tgt_rec, tp, ks)
    return max(float(abs(x - y)) for x, y in zip(lhs_terms, rhs_terms))


def id_abel_from_rothe_probe(m, a=1, b=2, c=3, n: int = 3):
    """|n! * HR(ma, mb, mc) / m^n - (a + c)^n| in exact rationals; O(1/m)."""
    field = Field.exact()
    m = field(m)
    p = ParameterPoint.make(field, 0.5, a=m * a, b=m * b, c=m * c, n=n)
    hr = sum((_rothe_summand(p, k) for k in range(n + 1)), field(0))
    scaled = hr * math.factorial(n) / m**n
    return abs(scaled - (field(a) + field(c)) ** n)


def bns_shift_check(l: int, b=0.2, c=5.0, d=1 / 3, q=0.5, tol: float = 1e-12):
    """Relative deviation for the bilateral curious sum at e = q^l.

    At e = q^l every term with k < -l vanishes, so the series is the
    unilateral sum over j >= 0 of the terms at k = j - l.  That shifted sum
    is evaluated on its own and compared with the closed form
    (q, d q^l; q)_inf / ((d, q^(1+l); q)_inf (q^l - b)).
    """
    field = Field.floating()
    p = ParameterPoint.make(field, q, b=b, c=c, d=d, e=field(q) ** l)
    rec = THM_BNS

    def term(j):
        return as_qterm(rec.summand(p, j - l)).evaluate(p.q, tol / 4)

    shifted = sum_series(TermSeries(term, "unilateral", tol=tol)).value
    qq, dd = p.q, p["d"]
    closed = QTerm(1 / (qq**l - p["b"]), (qq, dd * qq**l), (dd, qq ** (1 + l))).evaluate(qq, tol / 4)[0]
    return float(abs(shifted - closed) / max(abs(closed), 1e-300))
