"""Classical summations: 1psi1, q-Gauss, q-Pfaff-Saalschuetz, the very-well-poised
family (6phi5, 5phi5, 6psi6, 4psi6) and the ordinary binomial-type sums.

Every very-well-poised record takes ``sqrt_a`` as its primitive input and
uses a = sqrt_a**2, so the parameters q*sqrt(a), -q*sqrt(a) need no branch
choice.
"""

from __future__ import annotations

from .qcore import QTerm, binomial, qbinom2, qpoch_ratio, rising_factorial
from .errors import PoleError
from .registry import Degeneration, IdentityRecord, register


def _abs(x) -> float:
    return float(abs(x))


# --- Ramanujan's 1psi1 -----------------------------------------------------


def _1psi1_summand(p, k):
    q, a, b, z = p.q, p["a"], p["b"], p["z"]
    return qpoch_ratio([a], [b], q, k, p.pole_margin) * z**k


def _1psi1_lhs(p):
    q, a, b, z = p.q, p["a"], p["b"], p["z"]
    if a == b:
        raise PoleError("1psi1 with a = b: the bilateral series diverges")
    az = a * z
    return QTerm(1, (q, b / a, az, q / az), (b, q / a, z, b / az))


ONE_PSI_ONE = register(
    IdentityRecord(
        id="1psi1",
        title="Ramanujan's 1psi1 summation",
        params_required=("a", "b", "z"),
        lhs=_1psi1_lhs,
        summand=_1psi1_summand,
        kind="bilateral",
        domain_text="|b/a| < |z| < 1",
        ratios=lambda p: {"|z|": _abs(p["z"]), "|b/a|/|z|": _abs(p["b"] / p["a"]) / _abs(p["z"])},
    )
)


# --- q-Gauss and q-Pfaff-Saalschuetz ------------------------------------------


def _qgauss_summand(p, k):
    q, a, b, c = p.q, p["a"], p["b"], p["c"]
    return qpoch_ratio([a, b], [q, c], q, k, p.pole_margin) * (c / (a * b)) ** k


def _qgauss_lhs(p):
    a, b, c = p["a"], p["b"], p["c"]
    return QTerm(1, (c / a, c / b), (c, c / (a * b)))


QGAUSS = register(
    IdentityRecord(
        id="qgauss",
        title="q-Gauss summation",
        params_required=("a", "b", "c"),
        lhs=_qgauss_lhs,
        summand=_qgauss_summand,
        kind="unilateral",
        domain_text="|c/ab| < 1",
        ratios=lambda p: {"|c/ab|": _abs(p["c"] / (p["a"] * p["b"]))},
    )
)


def _qps_summand(p, k):
    q, a, b, c, n = p.q, p["a"], p["b"], p["c"], p["n"]
    return qpoch_ratio([a, b, q**-n], [q, c, a * b * q ** (1 - n) / c], q, k, p.pole_margin) * q**k


def _qps_lhs(p):
    q, a, b, c, n = p.q, p["a"], p["b"], p["c"], p["n"]
    return qpoch_ratio([c / a, c / b], [c, c / (a * b)], q, n, p.pole_margin)


QPS = register(
    IdentityRecord(
        id="qps",
        title="q-Pfaff-Saalschuetz summation",
        params_required=("a", "b", "c", "n"),
        lhs=_qps_lhs,
        summand=_qps_summand,
        kind="terminating",
        exact_capable=True,
    )
)


# --- very-well-poised family ---------------------------------------------------


def _vwp_factor(p, k):
    """(q s, -q s;q)_k / (s, -s;q)_k with s = sqrt_a, in its pole-free product form."""
    s = p["sqrt_a"]
    sk = s * p.q**k
    return (1 - sk) * (1 + sk) / p.den((1 - s) * (1 + s))


def _65s_summand(p, k):
    q, a, b, c, n = p.q, p["a"], p["b"], p["c"], p["n"]
    ratio = qpoch_ratio(
        [a, b, c, q**-n],
        [q, a * q / b, a * q / c, a * q ** (1 + n)],
        q,
        k,
        p.pole_margin,
    )
    return ratio * _vwp_factor(p, k) * (a * q ** (1 + n) / (b * c)) ** k


def _65s_lhs(p):
    # printed with index k in the source; the series terminates at n
    q, a, b, c, n = p.q, p["a"], p["b"], p["c"], p["n"]
    return qpoch_ratio([a * q, a * q / (b * c)], [a * q / b, a * q / c], q, n, p.pole_margin)


def _65ns_summand(p, k):
    q, a, b, c, d = p.q, p["a"], p["b"], p["c"], p["d"]
    ratio = qpoch_ratio(
        [a, b, c, d],
        [q, a * q / b, a * q / c, a * q / d],
        q,
        k,
        p.pole_margin,
    )
    return ratio * _vwp_factor(p, k) * (a * q / (b * c * d)) ** k


def _65ns_lhs(p):
    q, a, b, c, d = p.q, p["a"], p["b"], p["c"], p["d"]
    aq = a * q
    return QTerm(
        1,
        (aq, aq / (b * c), aq / (b * d), aq / (c * d)),
        (aq / b, aq / c, aq / d, aq / (b * c * d)),
    )


def _55ns_summand(p, k):
    q, a, b, c = p.q, p["a"], p["b"], p["c"]
    ratio = qpoch_ratio([a, b, c], [q, a * q / b, a * q / c], q, k, p.pole_margin)
    return ratio * _vwp_factor(p, k) * (-1 if k % 2 else 1) * q ** qbinom2(k) * (a * q / (b * c)) ** k


def _55ns_lhs(p):
    q, a, b, c = p.q, p["a"], p["b"], p["c"]
    aq = a * q
    return QTerm(1, (aq, aq / (b * c)), (aq / b, aq / c))


def _66s_summand(p, k):
    q, a, b, c, d, e = p.q, p["a"], p["b"], p["c"], p["d"], p["e"]
    aq = a * q
    ratio = qpoch_ratio(
        [b, c, d, e], [aq / b, aq / c, aq / d, aq / e], q, k, p.pole_margin
    )
    return ratio * _vwp_factor(p, k) * (a * aq / (b * c * d * e)) ** k


def _66s_lhs(p):
    q, a, b, c, d, e = p.q, p["a"], p["b"], p["c"], p["d"], p["e"]
    aq = a * q
    return QTerm(
        1,
        (q, aq, q / a, aq / (b * c), aq / (b * d), aq / (b * e), aq / (c * d), aq / (c * e), aq / (d * e)),
        (q / b, q / c, q / d, q / e, aq / b, aq / c, aq / d, aq / e, a * aq / (b * c * d * e)),
    )


def _46s_summand(p, k):
    q, a, b, c = p.q, p["a"], p["b"], p["c"]
    aq = a * q
    ratio = qpoch_ratio([b, c], [aq / b, aq / c], q, k, p.pole_margin)
    return ratio * _vwp_factor(p, k) * q ** (2 * qbinom2(k)) * (a * aq / (b * c)) ** k


def _46s_lhs(p):
    q, a, b, c = p.q, p["a"], p["b"], p["c"]
    aq = a * q
    return QTerm(1, (q, aq, q / a, aq / (b * c)), (q / b, q / c, aq / b, aq / c))


VWP_65S = register(
    IdentityRecord(
        id="65s",
        title="terminating very-well-poised 6phi5 summation",
        params_required=("sqrt_a", "b", "c", "n"),
        lhs=_65s_lhs,
        summand=_65s_summand,
        kind="terminating",
        uses_sqrt_a=True,
        exact_capable=True,
    )
)

VWP_65NS = register(
    IdentityRecord(
        id="65ns",
        title="nonterminating very-well-poised 6phi5 summation",
        params_required=("sqrt_a", "b", "c", "d"),
        lhs=_65ns_lhs,
        summand=_65ns_summand,
        kind="unilateral",
        domain_text="|aq/bcd| < 1",
        ratios=lambda p: {"|aq/bcd|": _abs(p["a"] * p.q / (p["b"] * p["c"] * p["d"]))},
        uses_sqrt_a=True,
        degenerations=(
            Degeneration(
                "65s",
                "d = q^-n",
                lambda t: (t.with_values(d=t.q ** -t["n"]), t),
            ),
        ),
    )
)

VWP_55NS = register(
    IdentityRecord(
        id="55ns",
        title="nonterminating very-well-poised 5phi5 summation",
        params_required=("sqrt_a", "b", "c"),
        lhs=_55ns_lhs,
        summand=_55ns_summand,
        kind="unilateral",
        domain_text="converges everywhere",
        uses_sqrt_a=True,
    )
)

# The series argument is a^2 q/bcde; that is the convergence bound used here.
VWP_66S = register(
    IdentityRecord(
        id="66s",
        title="Bailey's very-well-poised 6psi6 summation",
        params_required=("sqrt_a", "b", "c", "d", "e"),
        lhs=_66s_lhs,
        summand=_66s_summand,
        kind="bilateral",
        domain_text="|a^2 q/bcde| < 1",
        ratios=lambda p: {
            "|a^2q/bcde|": _abs(p["a"] ** 2 * p.q / (p["b"] * p["c"] * p["d"] * p["e"]))
        },
        uses_sqrt_a=True,
        degenerations=(
            Degeneration("65ns", "e = a", lambda t: (t.with_values(e=t["a"]), t)),
        ),
    )
)

VWP_46S = register(
    IdentityRecord(
        id="46s",
        title="very-well-poised 4psi6 summation",
        params_required=("sqrt_a", "b", "c"),
        lhs=_46s_lhs,
        summand=_46s_summand,
        kind="bilateral",
        domain_text="converges for every nonzero argument",
        uses_sqrt_a=True,
    )
)


# --- ordinary (q = 1) summations ---------------------------------------------


def _binomial_summand(p, k):
    a, c, n = p["a"], p["c"], p["n"]
    return binomial(p.field(n), k) * a**k * c ** (n - k)


def _chu_summand(p, k):
    a, c, n = p["a"], p["c"], p["n"]
    return binomial(a, k) * binomial(c, n - k)


def _pfaff_summand(p, k):
    a, b, c, n = p["a"], p["b"], p["c"], p["n"]
    rf = rising_factorial
    return (
        rf(a, k) * rf(b, k) * rf(p.field(-n), k)
        / p.den(rf(p.field(1), k) * rf(c, k) * rf(a + b - c + 1 - n, k))
    )


def _pfaff_lhs(p):
    a, b, c, n = p["a"], p["b"], p["c"], p["n"]
    rf = rising_factorial
    return rf(c - a, n) * rf(c - b, n) / p.den(rf(c, n) * rf(c - a - b, n))


BINOMIAL = register(
    IdentityRecord(
        id="binomial",
        title="binomial theorem",
        params_required=("a", "c", "n"),
        lhs=lambda p: (p["a"] + p["c"]) ** p["n"],
        summand=_binomial_summand,
        kind="terminating",
        exact_capable=True,
    )
)

CHU_VANDERMONDE = register(
    IdentityRecord(
        id="chu_vandermonde",
        title="Chu-Vandermonde summation",
        params_required=("a", "c", "n"),
        lhs=lambda p: binomial(p["a"] + p["c"], p["n"]),
        summand=_chu_summand,
        kind="terminating",
        exact_capable=True,
    )
)

PFAFF_SAALSCHUTZ = register(
    IdentityRecord(
        id="pfaff_saalschutz",
        title="Pfaff-Saalschuetz summation",
        params_required=("a", "b", "c", "n"),
        lhs=_pfaff_lhs,
        summand=_pfaff_summand,
        kind="terminating",
        exact_capable=True,
    )
)


def id_1psi1():
    return ONE_PSI_ONE


def id_qgauss():
    return QGAUSS


def id_qps():
    return QPS


def id_65s():
    return VWP_65S


def id_65ns():
    return VWP_65NS


def id_55ns():
    return VWP_55NS


def id_66s():
    return VWP_66S


def id_46s():
    return VWP_46S


def id_binomial():
    return BINOMIAL


def id_chu_vandermonde():
    return CHU_VANDERMONDE


def id_pfaff_saalschutz():
    return PFAFF_SAALSCHUTZ
