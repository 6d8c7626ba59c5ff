import random
from fractions import Fraction as F

import pytest

from oracles import fqk
from qpsi import DegenerateInputError, Field, NonconvergenceError, ParameterPoint
from qpsi.curious import id_thm_tns, id_thm_ts
from qpsi.inversion import (
    apply_inverse_relation,
    cor1_pair,
    cor1_sequences,
    cor2_pair,
    diagonal_transfer,
    krattenthaler_pair,
    verify_orthogonality,
    worked_product,
)
from qpsi.qcore import as_qterm, qbinom2, qpoch_finite, qpoch_infinite

A, B, C, Q = F(1, 3), F(1, 5), F(7), F(1, 2)


def kratt_powers():
    return krattenthaler_pair(lambda j: F(2) ** j, lambda j: F(3) ** j, F(5))


def rand_ctx(rng):
    def r():
        x = F(rng.randint(1, 25), rng.randint(1, 25))
        return x if rng.random() < 0.5 else -x

    return r(), r(), r(), F(rng.randint(1, 6), rng.randint(7, 15))


class TestKrattenthaler:
    def test_diagonal(self):
        p = kratt_powers()
        assert all(p.f(k, k) == 1 and p.g(k, k) == 1 for k in range(1, 6))

    def test_example_window_hits_a0_equal_c0(self):
        # a_0 = c_0 = 1 makes the (a_k - c_k) factor of g vanish
        with pytest.raises(DegenerateInputError):
            verify_orthogonality(kratt_powers(), 0, 3)

    def test_window(self):
        rep = verify_orthogonality(kratt_powers(), 1, 4)
        assert rep.exact and rep.max_offdiag == 0 and rep.diag_dev == 0

    def test_dual(self):
        rep = verify_orthogonality(kratt_powers(), 1, 4)
        assert rep.dual_max_offdiag == 0 and rep.dual_diag_dev == 0

    def test_vanishing_c(self):
        p = krattenthaler_pair(lambda j: F(j + 2), lambda j: F(j - 1), F(5))
        with pytest.raises(DegenerateInputError):
            p.f(3, 1)

    def test_cor1_sequences(self):
        rep = verify_orthogonality(krattenthaler_pair(*cor1_sequences(A, B, C, Q)), 1, 5)
        assert rep.exact


class TestCor1:
    def test_window(self):
        assert verify_orthogonality(cor1_pair(A, B, C, Q), 0, 4).exact

    def test_trivial_window(self):
        p = cor1_pair(A, B, C, Q)
        assert p.f(2, 2) * p.g(2, 2) == 1
        assert verify_orthogonality(p, 2, 2).exact

    def test_diagonal_closed_form(self):
        # f(k,k) worked out by hand with the product oracle
        p = cor1_pair(A, B, C, Q)
        for k in range(6):
            r = (1 - B * Q**k) / (C - Q**k)
            expected = (-r * Q) ** k * Q ** (-k * (k + 1) // 2)
            expected *= fqk(A * Q**k, Q, k) / fqk(A * Q, Q, k) * fqk(A * Q / r, Q, k) / fqk(r, Q, k)
            assert p.f(k, k) == expected

    def test_random_contexts(self):
        rng = random.Random(5)
        done = 0
        while done < 5:
            try:
                rep = verify_orthogonality(cor1_pair(*rand_ctx(rng)), 0, 6)
            except DegenerateInputError:
                continue
            assert rep.exact
            done += 1

    def test_float_mode(self):
        rep = verify_orthogonality(cor1_pair(1 / 3, 0.2, 7.0, 0.5), 0, 6, mode="float")
        assert rep.max_offdiag < 1e-12 and rep.dual_max_offdiag < 1e-12 and not rep.exact

    def test_float_mode_relative(self):
        # large entries cancel; deviations are judged relative to sum |f g|
        rep = verify_orthogonality(cor1_pair(-0.6, 1.3, 2.5 + 0.5j, 0.3), 0, 6, mode="float")
        assert rep.scale > 1e5 and rep.within(1e-13)

    def test_pole(self):
        with pytest.raises(DegenerateInputError):
            cor1_pair(A, B, Q**2, Q).f(3, 2)


class TestCor2:
    def test_window(self):
        assert verify_orthogonality(cor2_pair(A, B, C, Q), 0, 4).exact

    def test_diagonal_g(self):
        rng = random.Random(11)
        for _ in range(3):
            p = cor2_pair(*rand_ctx(rng))
            assert all(p.g(k, k) == 1 for k in range(6))

    def test_signs_positive_parameters(self):
        assert verify_orthogonality(cor2_pair(F(2, 7), F(3, 11), F(5, 3), F(1, 4)), 0, 3).exact


class TestTransfers:
    def test_krattenthaler_to_cor1(self):
        _, _, ok = diagonal_transfer(krattenthaler_pair(*cor1_sequences(A, B, C, Q)), cor1_pair(A, B, C, Q), 1, 6)
        assert ok

    def test_cor1_to_cor2(self):
        u, v, ok = diagonal_transfer(cor1_pair(A, B, C, Q), cor2_pair(A, B, C, Q), 0, 6)
        assert ok and u[0] == 1

    def test_unrelated_pairs(self):
        _, _, ok = diagonal_transfer(cor1_pair(A, B, C, Q), cor2_pair(A, B, F(9), Q), 0, 4)
        assert not ok

    def test_worked_product(self):
        for k in range(7):
            for l in range(k + 1):
                d, c = worked_product(A, B, C, Q, k, l)
                assert d == c


class TestInverseRelations:
    def test_round_trip(self):
        p = cor1_pair(A, B, C, Q)
        a = [F(j * j - 3, j + 2) for j in range(7)]
        b = apply_inverse_relation(p, a, "inv_f", range(7))
        assert apply_inverse_relation(p, b, "inv_g", range(7)) == a

    def test_unknown_direction(self):
        with pytest.raises(ValueError):
            apply_inverse_relation(cor1_pair(A, B, C, Q), [1], "sideways", [0])

    def test_rotinv_nonconvergent(self):
        p = cor2_pair(0.3, 0.2, 4.0, 0.5)
        with pytest.raises(NonconvergenceError):
            apply_inverse_relation(p, lambda n: 1 / p.f(n, 0), "rotinv_f", [0], max_terms=200)

    def test_terminating_reconstruction(self):
        # a_k and b_l from the terminating 6phi5 sum; inv_f gives the curious sum termwise
        a, b, c, d, q, n = A, B, C, F(2), Q, 3
        p = cor1_pair(a, b, c, q)

        def R(k):
            return (1 - b * q**k) / (c - q**k)

        def ak(k):
            return (
                qpoch_finite(a * q, q, k) / qpoch_finite(a * d, q, k)
                * qpoch_finite(a * d / R(k), q, k) / qpoch_finite(a * q / R(k), q, k)
            )

        def bl(l):
            return qpoch_finite(q / d, q, l) / qpoch_finite(a * d, q, l) * (a * d) ** l

        assert apply_inverse_relation(p, ak, "inv_f", range(5)) == [bl(m) for m in range(5)]
        assert apply_inverse_relation(p, bl, "inv_g", range(5)) == [ak(m) for m in range(5)]
        pt = ParameterPoint.make(Field.exact(), q, a=a, b=b, c=c, d=d, n=n)
        for k in range(n + 1):
            assert p.f(n, k) * ak(k) == id_thm_ts().summand(pt, k)

    def test_nonterminating_reconstruction(self):
        # a_n and b_k from the nonterminating 5phi5 sum; rotinv_g at l = 0 gives the curious sum
        a, b, c, d, q = 0.3, 0.2, 4.0, 0.3, 0.5
        p = cor2_pair(a, b, c, q)

        def qi(x):
            return qpoch_infinite(x, q).value

        def R(k):
            return (1 - b * q**k) / (c - q**k)

        def an(m):
            return (-1) ** m * q ** qbinom2(m) * qpoch_finite(q / d, q, m) / qpoch_finite(a * d, q, m) * d**m

        def bk(k):
            return (
                (-1) ** k * q ** qbinom2(k) * d**k * qpoch_finite(q / d, q, k)
                * qi(a * q ** (1 + 2 * k)) / qi(a * d) * qi(R(k) * d) / qi(R(k) * q ** (1 + k))
            )

        got = apply_inverse_relation(p, an, "rotinv_f", range(4))
        assert all(abs(x - bk(k)) < 1e-13 for k, x in enumerate(got))
        assert abs(apply_inverse_relation(p, bk, "rotinv_g", [0])[0] - an(0)) < 1e-13
        pt = ParameterPoint.make(Field.floating(), q, a=a, b=b, c=c, d=d)
        rec = id_thm_tns()
        lhs = as_qterm(rec.lhs(pt)).evaluate(pt.q)[0]
        for k in range(6):
            term = as_qterm(rec.summand(pt, k)).evaluate(pt.q)[0] / lhs
            assert abs(p.g(k, 0) * bk(k) - term) < 1e-13
