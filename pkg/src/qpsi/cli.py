"""Command-line front end.

Exit status: 0 when every requested check passes, 1 on a verification
failure, 2 on a usage error (including an unknown identity id).
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Dict, List, Optional

from . import harness, registry
from .curious import LIMIT_MAPS, id_abel_from_rothe_probe, vwp_limit_probe
from .errors import QPsiError, UnknownIdentityError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _common(p: argparse.ArgumentParser, count: int):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=count)
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qpsi", description="Verify q-series summation identities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("list", help="list registered identities")
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.add_argument("--output", "-o", default=None)

    p = sub.add_parser("verify", help="run one identity campaign")
    p.add_argument("--id", required=True)
    p.add_argument("--mode", choices=("exact", "float"), default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--precision", type=int, default=None, help="decimal digits in float mode")
    _common(p, 100)

    p = sub.add_parser("verify-all", help="run every campaign and the named suites")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--precision", type=int, default=None)
    p.add_argument("--exact-count", type=int, default=50)
    p.add_argument("--no-suites", action="store_true")
    _common(p, 100)

    p = sub.add_parser("orthogonality", help="check matrix-inverse orthogonality")
    p.add_argument("--pair", choices=harness.PAIRS + ("all",), default="all")
    p.add_argument("--window", type=int, nargs=2, metavar=("L", "N"), default=None)
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--tol", type=float, default=1e-12)
    _common(p, 25)

    p = sub.add_parser("degenerations", help="termwise degeneration checks")
    p.add_argument("--mode", choices=("exact", "float"), default="exact")
    p.add_argument("--tol", type=float, default=1e-12)
    _common(p, 10)

    p = sub.add_parser("probe-limit", help="decay of the b -> infinity and Abel limits")
    p.add_argument("--id", default=None, help="limit source (thm_ts, ..., or hagen_rothe)")
    p.add_argument("--B", type=float, default=1e6)
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.add_argument("--output", "-o", default=None)
    return parser


def _precision(args) -> int:
    if getattr(args, "precision", None) is not None:
        digits = args.precision
    else:
        env = os.environ.get("QPSI_PRECISION")
        try:
            digits = int(env) if env else 15
        except ValueError:
            raise _UsageError(f"QPSI_PRECISION must be an integer, got {env!r}") from None
    if digits < 15:
        raise _UsageError("precision must be at least 15 digits")
    return digits


def _human(reports: Dict[str, object]) -> str:
    lines = []
    for key, rep in reports.items():
        tag = "PASS" if rep.passed else "FAIL"
        if isinstance(rep, harness.VerificationReport):
            lines.append(
                f"{tag}  {key:<22} {rep.mode:<5} samples={len(rep.samples):<4} "
                f"max_rel_residual={rep.max_rel_residual:.3e} failures={len(rep.failures)}"
            )
            for f in rep.failures[:5]:
                lines.append(f"      #{f['index']}: {f['reason']}  point={harness._plain(f['point'])}")
        else:
            lines.append(f"{tag}  {key:<22} checks={len(rep.checks):<4} failures={len(rep.failures)}")
            for f in rep.failures[:5]:
                lines.append(f"      {f['name']}: {harness._plain(f['detail'])}")
    return "\n".join(lines)


def _emit(args, reports: Dict[str, object]) -> int:
    text = harness.to_json(reports) if args.format == "json" else _human(reports)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if all(r.passed for r in reports.values()) else EXIT_FAIL


def _check_id(identity_id: str):
    try:
        return registry.get(identity_id)
    except UnknownIdentityError:
        raise _UsageError(f"unknown identity id {identity_id!r}; see `qpsi list`") from None


def _cmd_list(args) -> int:
    recs = list(registry.records())
    if args.format == "json":
        import json

        text = json.dumps(
            [
                {"id": r.id, "title": r.title, "kind": r.kind, "params": list(r.params_required),
                 "domain": r.domain_text, "exact": r.exact_capable}
                for r in recs
            ],
            sort_keys=True,
            indent=2,
        )
    else:
        text = "\n".join(f"{r.id:<18} {r.kind:<12} {r.title}  [{r.domain_text}]" for r in recs)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_verify(args) -> int:
    rec = _check_id(args.id)
    mode = args.mode or harness.default_mode(args.id)
    if mode == "exact" and not rec.exact_capable:
        raise _UsageError(f"{args.id} is nonterminating; exact mode is not available")
    spec = harness.SampleSpec(args.id, args.count, args.seed, mode, tol=args.tol, digits=_precision(args))
    return _emit(args, {args.id: harness.verify(args.id, spec)})


def _cmd_verify_all(args) -> int:
    digits = _precision(args)
    reports = harness.verify_all(
        count=args.count, exact_count=args.exact_count, seed=args.seed, tol=args.tol,
        digits=digits, suites=not args.no_suites,
    )
    return _emit(args, reports)


def _cmd_orthogonality(args) -> int:
    if args.window and args.window[1] < args.window[0]:
        raise _UsageError("--window needs L <= N")
    pairs = harness.PAIRS if args.pair == "all" else (args.pair,)
    rep = harness.orthogonality_suite(
        pairs, contexts=args.count, seed=args.seed, mode=args.mode,
        window=tuple(args.window) if args.window else None, tol=args.tol,
    )
    return _emit(args, {"orthogonality": rep})


def _cmd_degenerations(args) -> int:
    rep = harness.degeneration_suite(count=args.count, seed=args.seed, mode=args.mode, tol=args.tol)
    return _emit(args, {"degenerations": rep})


def _cmd_probe_limit(args) -> int:
    sources = sorted({s for s, _ in LIMIT_MAPS}) + ["hagen_rothe"]
    if args.id is not None and args.id not in sources:
        _check_id(args.id)
        raise _UsageError(f"no limit probe for {args.id!r}; choose from {', '.join(sources)}")
    if args.B <= 0:
        raise _UsageError("--B must be positive")
    rep = harness.SuiteReport("limits")
    for src, tgt in LIMIT_MAPS:
        if args.id in (None, src):
            d1, d2 = vwp_limit_probe(src, tgt, args.B), vwp_limit_probe(src, tgt, 2 * args.B)
            ratio = d2 / d1 if d1 else float("nan")
            rep.checks.append(harness.CheckResult(
                f"{src}->{tgt}", abs(ratio - 0.5) <= 0.05,
                {"B": args.B, "dev_B": d1, "dev_2B": d2, "ratio": ratio},
            ))
    if args.id in (None, "hagen_rothe"):
        m = max(int(args.B), 1)
        r1, r2 = float(id_abel_from_rothe_probe(m)), float(id_abel_from_rothe_probe(2 * m))
        ratio = r2 / r1 if r1 else float("nan")
        rep.checks.append(harness.CheckResult(
            "hagen_rothe->abel", abs(ratio - 0.5) <= 0.05,
            {"m": m, "dev_m": r1, "dev_2m": r2, "ratio": ratio},
        ))
    return _emit(args, {"limits": rep})


COMMANDS = {
    "list": _cmd_list,
    "verify": _cmd_verify,
    "verify-all": _cmd_verify_all,
    "orthogonality": _cmd_orthogonality,
    "degenerations": _cmd_degenerations,
    "probe-limit": _cmd_probe_limit,
}


def run(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except QPsiError as exc:
        print(f"qpsi: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
