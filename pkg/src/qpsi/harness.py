"""Verification campaigns: sampling, residuals and reports.

A campaign draws parameter points for one identity (deterministically from a
seed), evaluates both sides at each point and records the residuals.  Errors
raised at a single point become recorded failures; a campaign never aborts
half way.
"""

from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import registry
from .curious import LIMIT_MAPS, bns_shift_check, id_abel_from_rothe_probe, vwp_limit_probe
from .errors import DegenerateInputError, ModeError, NonconvergenceError, PoleError, SamplingExhaustedError
from .inversion import (
    cor1_pair,
    cor1_sequences,
    cor2_pair,
    diagonal_transfer,
    krattenthaler_pair,
    verify_orthogonality,
    worked_product,
)
from .qcore import Field, ParameterPoint, as_qterm

MAX_ATTEMPTS = 10_000

# Errors that mark a point as unusable (sampling) or failed (campaign).
POINT_ERRORS = (PoleError, DegenerateInputError, NonconvergenceError, ModeError, ZeroDivisionError, OverflowError)


@dataclass(frozen=True)
class SampleSpec:
    id: str
    count: int = 100
    seed: int = 0
    mode: str = "float"
    q_range: Tuple[float, float] = (0.1, 0.7)
    margin: float = 0.9
    pole_margin: float = 1e-6
    tol: float = 1e-9
    series_tol: float = 1e-12
    digits: int = 15
    n_values: Tuple[int, ...] = tuple(range(9))

    @property
    def field(self) -> Field:
        return Field.exact() if self.mode == "exact" else Field.floating(self.digits)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


class _Draw:
    """Random scalars for one field.  Float mode draws complex values."""

    def __init__(self, rng: random.Random, spec: SampleSpec):
        self.rng = rng
        self.exact = spec.mode == "exact"
        self.q_range = spec.q_range

    def _phase(self):
        return cmath.exp(2j * math.pi * self.rng.random())

    def _rational(self, lo, hi):
        rng = self.rng
        while True:
            x = Fraction(rng.randint(1, 40), rng.randint(1, 40))
            if lo <= x <= hi:
                return x if rng.random() < 0.5 else -x

    def free(self, lo=0.2, hi=5.0):
        """Generic parameter with modulus between lo and hi."""
        if self.exact:
            return self._rational(Fraction(lo).limit_denominator(100), Fraction(hi).limit_denominator(100))
        return math.exp(self.rng.uniform(math.log(lo), math.log(hi))) * self._phase()

    def ratio(self, lo=0.05, hi=0.7):
        """A value of modulus in [lo, hi], used to place a domain ratio."""
        if self.exact:
            return self._rational(Fraction(1, 20), Fraction(7, 10))
        return self.rng.uniform(lo, hi) * self._phase()

    def q(self):
        lo, hi = self.q_range
        if self.exact:
            return self._rational(Fraction(lo).limit_denominator(100), Fraction(hi).limit_denominator(100))
        return self.rng.uniform(lo, hi) * self._phase()


def _abc(d: _Draw, q):
    return dict(a=d.free(), b=d.free(), c=d.free())


def _vwp3(d: _Draw, q):
    return dict(sqrt_a=d.free(0.3, 2.0), b=d.free(), c=d.free())


def _r_1psi1(d, q):
    a, z = d.free(), d.ratio()
    return dict(a=a, z=z, b=a * z * d.ratio())


def _r_qgauss(d, q):
    a, b = d.free(), d.free()
    return dict(a=a, b=b, c=a * b * d.ratio())


def _r_65ns(d, q):
    v = _vwp3(d, q)
    a = v["sqrt_a"] ** 2
    v["d"] = a * q / (v["b"] * v["c"] * d.ratio())
    return v


def _r_66s(d, q):
    v = _vwp3(d, q)
    v["d"] = d.free()
    a = v["sqrt_a"] ** 2
    v["e"] = a * a * q / (v["b"] * v["c"] * v["d"] * d.ratio())
    return v


def _r_curious_nt(d, q):
    return dict(a=d.free(), b=d.ratio() / q, c=d.free())


def _r_ts(d, q):
    return dict(a=d.free(), b=d.free(), c=d.free(), d=d.free())


def _r_tns(d, q):
    c = d.free()
    return dict(a=d.free(), b=d.free(), c=c, d=c * d.ratio())


def _r_bns(d, q):
    b, c = d.free(), d.free()
    return dict(b=b, c=c, d=c * d.ratio(), e=b * d.ratio())


RECIPES: Dict[str, Callable] = {
    "1psi1": _r_1psi1,
    "qgauss": _r_qgauss,
    "qps": _abc,
    "65s": _vwp3,
    "65ns": _r_65ns,
    "55ns": _vwp3,
    "66s": _r_66s,
    "46s": _vwp3,
    "binomial": lambda d, q: dict(a=d.free(), c=d.free()),
    "chu_vandermonde": lambda d, q: dict(a=d.free(), c=d.free()),
    "pfaff_saalschutz": _abc,
    "abel": _abc,
    "hagen_rothe": _abc,
    "curious_ps": _abc,
    "curious_qps": _abc,
    "curious_nt": _r_curious_nt,
    "thm_ts": _r_ts,
    "thm_tns": _r_tns,
    "thm_tnsc": _r_tns,
    "thm_bns": _r_bns,
    "thm_bnsc": _r_bns,
}


def _screen(record, p: ParameterPoint, margin: float) -> bool:
    """Domain (with margin) and pole checks over the first few indices."""
    if not record.domain(p, margin):
        return False
    if record.kind == "terminating":
        ks = range(0, p["n"] + 1)
    elif record.kind == "bilateral":
        ks = range(-8, 9)
    else:
        ks = range(0, 9)
    try:
        if p.field.is_exact:
            # nonterminating closed forms keep symbolic infinite products
            lhs = as_qterm(record.lhs(p))
            if record.exact_capable:
                lhs.exact_value(p.q)
            for k in ks:
                record.summand(p, k)
        else:
            lhs, _ = record.evaluate_lhs(p)
            if not _finite(lhs) or lhs == 0:
                return False
            for k in ks:
                if not _finite(as_qterm(record.summand(p, k)).evaluate(p.q, 1e-8)[0]):
                    return False
    except POINT_ERRORS:
        return False
    return True


def _finite(x) -> bool:
    try:
        return math.isfinite(abs(x))
    except (TypeError, ValueError):
        return False


def _draw_point(record, rng, spec: SampleSpec, n: Optional[int], fixed=()) -> ParameterPoint:
    draw = _Draw(rng, spec)
    fld = spec.field
    recipe = RECIPES[record.id]
    for _ in range(MAX_ATTEMPTS):
        q = draw.q()
        values = recipe(draw, q)
        values.update(dict(fixed))
        if n is not None:
            values["n"] = n
        sqrt_a = values.pop("sqrt_a", None)
        try:
            p = ParameterPoint.make(fld, q, sqrt_a=sqrt_a, pole_margin=spec.pole_margin, **values)
        except (ValueError, ZeroDivisionError):
            continue
        if _screen(record, p, spec.margin):
            return p
    raise SamplingExhaustedError(f"{record.id}: no admissible point in {MAX_ATTEMPTS} attempts")


def sample(spec: SampleSpec, record=None, fixed=()) -> List[ParameterPoint]:
    """Deterministic rejection sample of ``spec.count`` admissible points.

    Terminating identities get ``spec.count`` points for each n in
    ``spec.n_values``.
    """
    record = record or registry.get(spec.id)
    if spec.mode == "exact" and not record.exact_capable:
        raise ModeError(f"{record.id} has no exact campaign (nonterminating series)")
    rng = random.Random(spec.seed)
    if record.kind == "terminating":
        return [_draw_point(record, rng, spec, n, fixed) for n in spec.n_values for _ in range(spec.count)]
    return [_draw_point(record, rng, spec, None, fixed) for _ in range(spec.count)]


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class SampleResult:
    index: int
    point: dict
    lhs: object = None
    rhs: object = None
    abs_residual: float = math.nan
    rel_residual: float = math.nan
    lhs_tail: float = 0.0
    rhs_tail: float = 0.0
    terms_used: int = 0
    digits: int = 15
    abs_sum: float = 0.0
    error_budget: float = 0.0
    passed: bool = False
    error: Optional[str] = None


@dataclass
class VerificationReport:
    id: str
    mode: str
    tol: float
    seed: int
    samples: List[SampleResult] = field(default_factory=list)

    @property
    def failures(self) -> List[dict]:
        return [
            {"index": s.index, "point": s.point, "reason": s.error or f"relative residual {s.rel_residual!r}"}
            for s in self.samples
            if not s.passed
        ]

    @property
    def max_rel_residual(self) -> float:
        vals = [s.rel_residual for s in self.samples if not math.isnan(s.rel_residual)]
        return max(vals, default=0.0)

    @property
    def passed(self) -> bool:
        return bool(self.samples) and not self.failures

    def to_dict(self) -> dict:
        return {
            "kind": "identity",
            "id": self.id,
            "mode": self.mode,
            "tol": self.tol,
            "seed": self.seed,
            "passed": self.passed,
            "summary": {
                "samples": len(self.samples),
                "max_rel_residual": self.max_rel_residual,
                "failures": self.failures,
            },
            "samples": [asdict(s) for s in self.samples],
        }


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class SuiteReport:
    """Named checks that are not per-point identity campaigns."""

    name: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def failures(self) -> List[dict]:
        return [{"name": c.name, "detail": c.detail} for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return bool(self.checks) and not self.failures

    def to_dict(self) -> dict:
        return {
            "kind": "suite",
            "name": self.name,
            "passed": self.passed,
            "summary": {"checks": len(self.checks), "failures": self.failures},
            "checks": [asdict(c) for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


def relative_residual(lhs, rhs) -> float:
    return float(abs(lhs - rhs)) / max(float(abs(lhs)), float(abs(rhs)), 1e-300)


def error_budget(ev, digits: int) -> float:
    """Tail bounds of both sides plus a rounding allowance.

    Rounding is 10 ulps of |lhs| plus the recursive-summation bound
    (10 + terms) ulps of sum |t_k|, which dominates under cancellation.
    """
    if digits == 0:
        return 0.0
    eps = Field.floating(digits).eps
    n = ev.series.terms_used
    rounding = eps * (10 * float(abs(ev.lhs)) + (10 + n) * float(ev.series.abs_sum))
    return float(ev.lhs_error) + float(ev.series.tail_bound) + rounding


def condition_number(ev) -> float:
    """sum |terms| / |sum|: how many digits the summation loses to cancellation."""
    return ev.series.abs_sum / max(float(abs(ev.rhs)), 1e-300)


def at_precision(p: ParameterPoint, digits: int) -> ParameterPoint:
    fld = Field.floating(digits)
    values = dict(p.params)
    if p.sqrt_a is not None:
        values.pop("a", None)
    return ParameterPoint.make(
        fld, p.q, sqrt_a=p.sqrt_a, pole_margin=p.pole_margin, **values, **p.ints
    )


def _evaluate(record, p: ParameterPoint, spec: SampleSpec, rounds: int = 4):
    """Evaluate one point until its error budget is well inside ``spec.tol``.

    Cancellation (condition number kappa) costs log10(kappa) digits of both
    the working precision and the per-term truncation tolerances, so an
    uncertified result is re-run with more digits and a tighter series
    tolerance.  Returns (evaluation, digits used).
    """
    stol = spec.series_tol
    ev = record.evaluate(p, stol)
    if p.field.is_exact:
        return ev, 0
    for _ in range(rounds):
        kappa = max(condition_number(ev), 1.0)
        scale = max(float(abs(ev.lhs)), float(abs(ev.rhs)), 1e-300)
        budget = ev.lhs_error + ev.series.tail_bound
        if kappa * p.field.eps * 100 < spec.tol and budget < 0.01 * spec.tol * scale:
            break
        digits = max(p.field.digits, spec.digits + math.ceil(math.log10(kappa)) + 4)
        if kappa * p.field.eps * 100 >= spec.tol:
            digits = max(digits, p.field.digits + 10)
        stol = min(stol, spec.series_tol / kappa)
        p = at_precision(p, digits)
        ev = record.evaluate(p, stol)
    return ev, p.field.digits


def _check_point(record, p: ParameterPoint, index: int, spec: SampleSpec) -> SampleResult:
    res = SampleResult(index, p.symbols())
    try:
        ev, res.digits = _evaluate(record, p, spec)
    except POINT_ERRORS as exc:
        res.error = f"{type(exc).__name__}: {exc}"
        return res
    res.lhs, res.rhs = ev.lhs, ev.rhs
    res.lhs_tail, res.rhs_tail = ev.lhs_error, ev.series.tail_bound
    res.terms_used = ev.series.terms_used
    res.abs_sum = ev.series.abs_sum
    res.error_budget = error_budget(ev, res.digits)
    if p.field.is_exact:
        diff = ev.lhs - ev.rhs
        res.abs_residual = float(abs(diff))
        res.rel_residual = 0.0 if diff == 0 else relative_residual(ev.lhs, ev.rhs)
        res.passed = diff == 0
    else:
        res.abs_residual = float(abs(ev.lhs - ev.rhs))
        res.rel_residual = relative_residual(ev.lhs, ev.rhs)
        res.passed = res.rel_residual < spec.tol
    return res


def verify(identity_id: str, spec: Optional[SampleSpec] = None, record=None) -> VerificationReport:
    """Run one campaign.  ``record`` overrides the registry entry (fault injection)."""
    spec = spec or SampleSpec(identity_id)
    base = registry.get(identity_id)
    record = record or base
    points = sample(spec, base)
    report = VerificationReport(identity_id, spec.mode, 0.0 if spec.mode == "exact" else spec.tol, spec.seed)
    report.samples = [_check_point(record, p, i, spec) for i, p in enumerate(points)]
    return report


def default_mode(identity_id: str) -> str:
    return "exact" if registry.get(identity_id).exact_capable else "float"


# ---------------------------------------------------------------------------
# Named suites
# ---------------------------------------------------------------------------


def _rat(rng: random.Random, lo=1, hi=30) -> Fraction:
    x = Fraction(rng.randint(lo, hi), rng.randint(lo, hi))
    return x if rng.random() < 0.5 else -x


def _rat_q(rng: random.Random) -> Fraction:
    while True:
        q = Fraction(rng.randint(1, 9), rng.randint(2, 15))
        if Fraction(1, 10) <= q <= Fraction(7, 10):
            return q if rng.random() < 0.5 else -q


def pair_context(pair: str, rng: random.Random, mode: str = "exact"):
    """Random context for one named inverse pair (retrying degenerate draws)."""
    conv = (lambda x: x) if mode == "exact" else (lambda x: complex(float(x)))
    if pair == "krattenthaler":
        # generic sequences: a_j, c_j rational functions of j with random coefficients
        coeffs = [_rat(rng) for _ in range(5)]
        d = conv(_rat(rng))

        def a_seq(j, c=coeffs):
            return conv(c[0] + c[1] * j + c[2] * j * j)

        def c_seq(j, c=coeffs):
            return conv(c[3] * 2**j + c[4])

        return krattenthaler_pair(a_seq, c_seq, d), {"coeffs": [str(c) for c in coeffs], "d": str(d)}
    a, b, c = (conv(_rat(rng)) for _ in range(3))
    q = conv(_rat_q(rng))
    ctx = {"a": a, "b": b, "c": c, "q": q}
    if pair == "cor1":
        return cor1_pair(a, b, c, q), ctx
    if pair == "cor2":
        return cor2_pair(a, b, c, q), ctx
    raise KeyError(pair)


PAIRS = ("krattenthaler", "cor1", "cor2")


def orthogonality_suite(
    pairs: Sequence[str] = PAIRS,
    contexts: int = 25,
    max_window: int = 8,
    seed: int = 0,
    mode: str = "exact",
    window: Optional[Tuple[int, int]] = None,
    tol: float = 1e-12,
) -> SuiteReport:
    """Orthogonality in both orientations on random contexts.

    Each context is checked on the window (l, l + max_window) for a few
    lower ends l; every sub-window (l', n') inside is covered by
    verify_orthogonality.  With ``window`` set only that window is used.
    """
    rng = random.Random(seed)
    report = SuiteReport("orthogonality")
    for name in pairs:
        done = 0
        attempts = 0
        while done < contexts:
            attempts += 1
            if attempts > MAX_ATTEMPTS:
                raise SamplingExhaustedError(f"no admissible context for {name}")
            pair, ctx = pair_context(name, rng, mode)
            windows = [window] if window else [(0, max_window), (2, 2 + max_window)]
            try:
                reps = [verify_orthogonality(pair, l, n, mode) for l, n in windows]
            except POINT_ERRORS:
                continue
            done += 1
            for (l, n), rep in zip(windows, reps):
                ok = rep.exact if mode == "exact" else rep.within(tol)
                report.checks.append(
                    CheckResult(
                        f"{name}[{done - 1}] window ({l},{n})",
                        ok,
                        {
                            "context": {k: _plain(v) for k, v in ctx.items()},
                            "max_offdiag": rep.max_offdiag,
                            "diag_dev": rep.diag_dev,
                            "dual_max_offdiag": rep.dual_max_offdiag,
                            "dual_diag_dev": rep.dual_diag_dev,
                        },
                    )
                )
    return report


def transfer_suite(contexts: int = 10, window: Tuple[int, int] = (0, 6), seed: int = 0) -> SuiteReport:
    """Diagonal-transfer consistency (Krattenthaler -> cor1 -> cor2) and the worked product."""
    rng = random.Random(seed)
    report = SuiteReport("transfer")
    done = 0
    while done < contexts:
        a, b, c, q = _rat(rng), _rat(rng), _rat(rng), _rat_q(rng)
        l, n = window
        try:
            kr = krattenthaler_pair(*cor1_sequences(a, b, c, q))
            c1, c2 = cor1_pair(a, b, c, q), cor2_pair(a, b, c, q)
            _, _, ok1 = diagonal_transfer(kr, c1, max(l, 1), n)
            _, _, ok2 = diagonal_transfer(c1, c2, l, n)
            prods = [worked_product(a, b, c, q, k, j) for k in range(7) for j in range(k + 1)]
        except POINT_ERRORS:
            continue
        ctx = {"a": str(a), "b": str(b), "c": str(c), "q": str(q)}
        report.checks.append(CheckResult(f"krattenthaler->cor1[{done}]", ok1, ctx))
        report.checks.append(CheckResult(f"cor1->cor2[{done}]", ok2, ctx))
        report.checks.append(CheckResult(f"worked-product[{done}]", all(x == y for x, y in prods), ctx))
        done += 1
    return report


def degeneration_check(record, deg, target_point: ParameterPoint) -> Tuple[bool, float]:
    """Termwise comparison of a degeneration at one target point.

    Exact mode compares symbolically reduced terms for exact equality;
    float mode returns the max relative termwise deviation.
    """
    src_p, tgt_p = deg.substitute(target_point)
    target = registry.get(deg.target)
    exact = target_point.field.is_exact
    q = target_point.q
    if deg.normalized:
        src_l, tgt_l = as_qterm(record.lhs(src_p)), as_qterm(target.lhs(tgt_p))
    worst = 0.0
    ok = True
    lo, hi = deg.k_range
    if target.kind == "terminating":
        hi = min(hi, tgt_p["n"])
    for k in range(lo, hi + 1):
        s = as_qterm(record.summand(src_p, k))
        t = as_qterm(target.summand(tgt_p, k))
        if deg.normalized:
            s, t = s * tgt_l, t * src_l
        if exact:
            if s.coef == 0 or t.coef == 0:
                same = s.coef == t.coef
            else:
                r = (s / t).reduced(q)
                same = r.is_finite and r.coef == 1
            ok = ok and same
            worst = max(worst, 0.0 if same else math.inf)
        else:
            sv, tv = s.evaluate(q)[0], t.evaluate(q)[0]
            dev = relative_residual(sv, tv) if (sv != 0 or tv != 0) else 0.0
            worst = max(worst, dev)
    return ok, worst


def degeneration_suite(count: int = 10, seed: int = 0, mode: str = "exact", tol: float = 1e-12) -> SuiteReport:
    rng = random.Random(seed)
    spec = SampleSpec("", count=1, mode=mode, margin=1.0)
    report = SuiteReport("degenerations")
    for record in registry.records():
        for deg in record.degenerations:
            target = registry.get(deg.target)
            n_vals = tuple(range(9))
            for i in range(count):
                n = n_vals[i % len(n_vals)] if target.kind == "terminating" else None
                name = f"{record.id}->{deg.target} ({deg.description}) [{i}]"
                for _ in range(100):
                    p = _draw_point(target, rng, spec, n, deg.fixed)
                    try:
                        ok, dev = degeneration_check(record, deg, p)
                        break
                    except POINT_ERRORS:
                        continue
                else:
                    report.checks.append(CheckResult(name, False, {"error": "no pole-free source point"}))
                    continue
                passed = ok if mode == "exact" else dev < tol
                report.checks.append(CheckResult(name, passed, {"point": p.symbols(), "max_dev": dev}))
    for l in range(6):
        dev = bns_shift_check(l)
        report.checks.append(CheckResult(f"thm_bns e=q^{l} shifted sum", dev < 1e-9, {"l": l, "rel_dev": dev}))
    return report


def limit_suite(B: float = 1e6, m: int = 10**6) -> SuiteReport:
    """O(1/B) decay of the b -> infinity limits and O(1/m) decay of the Abel limit."""
    report = SuiteReport("limits")
    for src, tgt in LIMIT_MAPS:
        d1 = vwp_limit_probe(src, tgt, B)
        d2 = vwp_limit_probe(src, tgt, 2 * B)
        ratio = d2 / d1 if d1 else math.nan
        report.checks.append(
            CheckResult(f"{src}->{tgt}", abs(ratio - 0.5) <= 0.05, {"B": B, "dev_B": d1, "dev_2B": d2, "ratio": ratio})
        )
    r1 = float(id_abel_from_rothe_probe(m))
    r2 = float(id_abel_from_rothe_probe(2 * m))
    ratio = r2 / r1
    report.checks.append(
        CheckResult("hagen_rothe->abel", abs(ratio - 0.5) <= 0.05, {"m": m, "dev_m": r1, "dev_2m": r2, "ratio": ratio})
    )
    return report


def verify_all(
    count: int = 100,
    exact_count: int = 50,
    seed: int = 0,
    tol: float = 1e-9,
    digits: int = 15,
    ids: Optional[Sequence[str]] = None,
    suites: bool = True,
    perturb: Optional[Dict[str, float]] = None,
) -> Dict[str, object]:
    """Every registry entry (exact where possible) plus the named suites."""
    out: Dict[str, object] = {}
    perturb = perturb or {}
    for rid in ids or registry.ids():
        rec = registry.get(rid)
        mode = default_mode(rid)
        spec = SampleSpec(rid, exact_count if mode == "exact" else count, seed, mode, tol=tol, digits=digits)
        if rid in perturb:
            # a perturbation is only visible in floating point at the float tolerance
            spec = SampleSpec(rid, count, seed, "float", tol=tol, digits=digits, n_values=(8,))
        out[rid] = verify(rid, spec, rec.perturbed(perturb[rid]) if rid in perturb else None)
    if suites:
        out["suite:orthogonality"] = orthogonality_suite(seed=seed)
        out["suite:transfer"] = transfer_suite(seed=seed)
        out["suite:degenerations"] = degeneration_suite(seed=seed)
        out["suite:limits"] = limit_suite()
    return out


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _plain(x):
    """JSON-safe form of a scalar: rationals as strings, complex as [re, im]."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "real") and hasattr(x, "imag"):  # mpmath values keep full precision as text
        return [str(x.real), str(x.imag)]
    return str(x)


def to_json(reports) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats, two-space indent."""
    if isinstance(reports, dict):
        data = {k: v.to_dict() for k, v in reports.items()}
    else:
        data = reports.to_dict()
    return json.dumps(_plain(data), sort_keys=True, indent=2, allow_nan=True)
