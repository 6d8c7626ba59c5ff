import json
import math
from dataclasses import replace
from fractions import Fraction as F

import pytest

from qpsi import ModeError, PoleError, SamplingExhaustedError, registry
from qpsi.harness import (
    SampleSpec,
    degeneration_suite,
    orthogonality_suite,
    relative_residual,
    sample,
    to_json,
    verify,
    verify_all,
)

FLOAT_IDS = ["1psi1", "qgauss", "65ns", "55ns", "66s", "46s", "curious_nt", "thm_tns", "thm_tnsc", "thm_bns", "thm_bnsc"]


class TestSample:
    def test_bilateral_ratios_inside_margin(self):
        for p in sample(SampleSpec("thm_bns", count=100, seed=3)):
            assert abs(p["d"] / p["c"]) <= 0.9 and abs(p["e"] / p["b"]) <= 0.9
            assert 0.1 <= abs(p.q) <= 0.7

    def test_exact_rationals_fit_64_bits(self):
        pts = sample(SampleSpec("thm_ts", count=10, seed=1, mode="exact"))
        assert len(pts) == 90
        for p in pts:
            for name, v in p.symbols().items():
                if isinstance(v, F):
                    assert abs(v.numerator) < 2**64 and v.denominator < 2**64, name

    def test_deterministic(self):
        a = sample(SampleSpec("thm_bns", count=20, seed=42))
        b = sample(SampleSpec("thm_bns", count=20, seed=42))
        assert [p.symbols() for p in a] == [p.symbols() for p in b]

    def test_seed_changes_points(self):
        a = sample(SampleSpec("1psi1", count=5, seed=1))
        b = sample(SampleSpec("1psi1", count=5, seed=2))
        assert [p.symbols() for p in a] != [p.symbols() for p in b]

    def test_exact_mode_needs_terminating_record(self):
        with pytest.raises(ModeError):
            sample(SampleSpec("thm_bns", count=1, mode="exact"))

    def test_empty_domain(self):
        # a margin of zero leaves no admissible ratio
        with pytest.raises(SamplingExhaustedError):
            sample(SampleSpec("thm_bns", count=1, margin=0.0))


class TestVerify:
    def test_thm_ts_exact(self):
        rep = verify("thm_ts", SampleSpec("thm_ts", count=50, seed=0, mode="exact"))
        assert len(rep.samples) == 450 and not rep.failures
        assert all(s.abs_residual == 0 and s.lhs == s.rhs for s in rep.samples)

    def test_1psi1_float(self):
        rep = verify("1psi1", SampleSpec("1psi1", count=100, seed=0))
        assert rep.passed and rep.max_rel_residual < 1e-9

    def test_qps_exact(self):
        rep = verify("qps", SampleSpec("qps", count=10, seed=0, mode="exact"))
        assert rep.passed

    def test_failures_are_recorded_not_raised(self):
        base = registry.get("1psi1")

        def summand(p, k):
            if k == 3 and p["z"].real > 0:
                raise PoleError("injected")
            return base.summand(p, k)

        rep = verify("1psi1", SampleSpec("1psi1", count=20, seed=0), replace(base, summand=summand))
        assert len(rep.samples) == 20
        bad = [s for s in rep.samples if s.error]
        assert bad and len(bad) < 20
        assert all("PoleError" in f["reason"] for f in rep.failures)
        # failures carry the full point so they are replayable
        assert all(set(f["point"]) >= {"a", "b", "z", "q"} for f in rep.failures)

    def test_perturbation_fails(self):
        rec = registry.get("thm_tns").perturbed(1e-6)
        rep = verify("thm_tns", SampleSpec("thm_tns", count=10, seed=0), rec)
        assert not rep.passed and rep.max_rel_residual > 1e-7

    def test_exact_campaign_reproducible(self):
        spec = SampleSpec("curious_qps", count=5, seed=9, mode="exact")
        assert to_json(verify("curious_qps", spec)) == to_json(verify("curious_qps", spec))


@pytest.mark.parametrize("rid", FLOAT_IDS)
def test_error_budget_coherence(rid):
    """Residual never exceeds tail bounds plus the rounding allowance."""
    rep = verify(rid, SampleSpec(rid, count=40, seed=5, n_values=(2, 8)))
    assert rep.passed
    for s in rep.samples:
        assert s.abs_residual <= s.error_budget, (s.index, s.abs_residual, s.error_budget)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_seed_stability(seed):
    out = verify_all(count=15, exact_count=3, seed=seed, ids=["1psi1", "thm_bnsc", "thm_ts", "abel"], suites=False)
    assert all(r.passed for r in out.values())


def test_verify_all_perturbed_identity_fails():
    out = verify_all(count=10, seed=0, ids=["thm_ts", "qgauss"], suites=False, perturb={"thm_ts": 1e-6})
    assert not out["thm_ts"].passed and out["qgauss"].passed


def test_suites_pass_small():
    assert orthogonality_suite(contexts=3, seed=4).passed
    assert degeneration_suite(count=2, seed=4).passed


class TestReports:
    def test_relative_residual_definition(self):
        assert relative_residual(2.0, 1.0) == 0.5
        assert relative_residual(0.0, 0.0) == 0.0
        assert relative_residual(1e-310, 0.0) == pytest.approx(1e-310 / 1e-300)

    def test_json_round_trip(self):
        rep = {"1psi1": verify("1psi1", SampleSpec("1psi1", count=3, seed=0))}
        text = to_json(rep)
        assert json.dumps(json.loads(text), sort_keys=True, indent=2) == text

    def test_json_fields(self):
        d = json.loads(to_json(verify("thm_ts", SampleSpec("thm_ts", count=1, mode="exact", n_values=(3,)))))
        assert {"id", "mode", "tol", "seed", "passed", "summary", "samples"} <= set(d)
        s = d["samples"][0]
        for key in ("point", "lhs", "rhs", "abs_residual", "rel_residual", "lhs_tail", "rhs_tail", "terms_used"):
            assert key in s
        assert s["lhs"] == s["rhs"] and isinstance(s["lhs"], str)

    def test_max_rel_residual_ignores_errors(self):
        rep = verify("1psi1", SampleSpec("1psi1", count=2, seed=0))
        rep.samples[0].rel_residual = math.nan
        assert not math.isnan(rep.max_rel_residual)
