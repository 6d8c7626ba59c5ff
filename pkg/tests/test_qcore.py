from fractions import Fraction as F

import pytest

from qpsi import (
    Field,
    ModeError,
    NonconvergenceError,
    ParameterPoint,
    PoleError,
    QTerm,
    TermSeries,
    binomial,
    qpoch_finite,
    qpoch_infinite,
    rising_factorial,
    sum_series,
)
from qpsi.qcore import qbinom2, qpoch_ratio

# (1/2;1/2)_inf from mpmath.qp at 40 digits (tests/oracles.py)
QINF_HALF = 0.2887880950866024212788997219292307800889


class TestQpochFinite:
    def test_empty_product(self):
        assert qpoch_finite(F(7, 3), F(1, 5), 0) == 1
        assert qpoch_finite(0.3 + 0.1j, 0.5, 0) == 1

    def test_one_factor(self):
        assert qpoch_finite(F(1, 2), F(1, 4), 1) == F(1, 2)

    def test_negative_index(self):
        # 1/(1 - a/q) with a = 1/2, q = 1/4
        assert qpoch_finite(F(1, 2), F(1, 4), -1) == -1

    def test_exact_stays_rational(self):
        v = qpoch_finite(F(2, 3), F(1, 3), -4)
        assert isinstance(v, F)

    def test_negative_index_pole(self):
        with pytest.raises(PoleError):
            qpoch_finite(F(1, 4), F(1, 4), -1)

    def test_ratio_matches_quotient(self):
        q = F(1, 3)
        for k in range(-5, 6):
            direct = qpoch_finite(F(2, 7), q, k) / qpoch_finite(F(5, 11), q, k)
            assert qpoch_ratio([F(2, 7)], [F(5, 11)], q, k) == direct


class TestQpochInfinite:
    def test_zero_argument(self):
        r = qpoch_infinite(0.0, 0.5)
        assert r.value == 1 and r.tail_bound == 0

    def test_half(self):
        r = qpoch_infinite(0.5, 0.5)
        assert abs(r.value - QINF_HALF) < 1e-15
        assert r.tail_bound < 1e-15

    def test_vanishing_first_factor(self):
        assert qpoch_infinite(1.0, 0.37).value == 0

    def test_high_precision(self):
        fld = Field.floating(40)
        r = qpoch_infinite(fld(F(1, 2)), fld(F(1, 2)), tol=1e-38)
        ctx = r.value.context
        assert abs(r.value - ctx.mpf("0.2887880950866024212788997219292307800889")) < 1e-36

    def test_exact_mode_rejected(self):
        with pytest.raises(ModeError):
            qpoch_infinite(F(1, 2), F(1, 2))

    @pytest.mark.parametrize("k", range(-6, 7))
    def test_shift_relation(self, k):
        a, q = 0.3 + 0.2j, 0.45 - 0.1j
        lhs = qpoch_finite(a, q, k) * qpoch_infinite(a * q**k, q).value
        assert abs(lhs - qpoch_infinite(a, q).value) < 1e-13


class TestSmallFunctions:
    def test_rising_factorial(self):
        assert rising_factorial(F(5), 0) == 1
        assert rising_factorial(3, 3) == 60
        assert rising_factorial(-2, 4) == 0

    def test_binomial(self):
        assert binomial(F(9, 4), 0) == 1
        assert binomial(5, 2) == 10
        assert binomial(F(1, 2), 2) == F(-1, 8)

    def test_qbinom2_negative(self):
        assert [qbinom2(k) for k in (-3, -1, 0, 1, 4)] == [6, 1, 0, 0, 6]


class TestParameterPoint:
    def test_base_modulus(self):
        with pytest.raises(ValueError):
            ParameterPoint.make(Field.exact(), 1, a=1)
        with pytest.raises(ValueError):
            ParameterPoint.make(Field.floating(), 0, a=1)

    def test_sqrt_a(self):
        p = ParameterPoint.make(Field.exact(), F(1, 2), sqrt_a=F(2, 3), b=1)
        assert p["a"] == F(4, 9)
        with pytest.raises(ValueError):
            ParameterPoint.make(Field.exact(), F(1, 2), sqrt_a=F(2, 3), a=F(1, 2))

    def test_integer_symbols(self):
        p = ParameterPoint.make(Field.floating(), 0.5, a=1, n=3)
        assert p["n"] == 3 and isinstance(p["n"], int)
        with pytest.raises(ValueError):
            ParameterPoint.make(Field.floating(), 0.5, n=1.5)


class TestSumSeries:
    def test_delta_bilateral(self):
        r = sum_series(TermSeries(lambda k: 1.0 if k == 0 else 0.0, "bilateral"))
        assert r.value == 1

    def test_geometric(self):
        r = sum_series(TermSeries(lambda k: 0.5**k, "unilateral", tol=1e-14))
        assert abs(r.value - 2) < 1e-13

    def test_terminating_exact(self):
        r = sum_series(TermSeries(lambda k: F(1, 2) ** k, "terminating", n=3, tol=None))
        assert r.value == F(15, 8)

    def test_terminating_policy_independent(self):
        s1 = sum_series(TermSeries(lambda k: F(k, 3), "terminating", n=5, tol=None))
        s2 = sum_series(TermSeries(lambda k: F(k, 3), "terminating", n=5, tol=1e-3))
        assert s1.value == s2.value

    def test_asymmetric_decay(self):
        # sides decay at 0.9 and 0.1: the slow side needs far more terms
        r = sum_series(TermSeries(lambda k: 0.9**k if k >= 0 else 0.1 ** (-k), "bilateral", tol=1e-12, rho_max=0.995))
        assert abs(r.value - (10 + 1 / 9)) < 1e-10

    def test_divergent(self):
        with pytest.raises(NonconvergenceError):
            sum_series(TermSeries(lambda k: 1.5**k, "unilateral"))


class TestQTerm:
    def test_exact_reduction(self):
        q = F(1, 3)
        t = QTerm(F(2), (F(1, 5),), (F(1, 5) * q**3,))
        assert t.exact_value(q) == 2 * qpoch_finite(F(1, 5), q, 3)

    def test_irreducible_exact(self):
        with pytest.raises(ModeError):
            QTerm(1, (F(1, 5),), (F(1, 7),)).exact_value(F(1, 2))

    def test_float_value(self):
        v, err = QTerm(2.0, (0.5,), ()).evaluate(0.5)
        assert abs(v - 2 * QINF_HALF) < 1e-15 and err < 1e-14


def test_exact_and_float_agree():
    q, a = F(2, 7), F(-3, 5)
    exact = qpoch_finite(a, q, 6) / qpoch_finite(a * q, q, -3)
    flt = qpoch_finite(float(a), float(q), 6) / qpoch_finite(float(a * q), float(q), -3)
    assert abs(flt - float(exact)) <= 10 * 1e-15 * abs(float(exact))
