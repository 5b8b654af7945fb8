"""Command-line entry point.

Exit codes: 0 success, 1 I/O or parse failure, 2 no feasible
configuration, 3 verification failure or unexpected verdict, 64 usage.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import auditor
from .hardy import ConfigRejected, NoFeasibleConfig, OptimizerSettings, hardy_score, optimize_hardy, verify_config
from .serialize import (
    FormatError,
    ReportFile,
    audit_report_to_dict,
    axiom_report_to_dict,
    condition_report_to_dict,
    config_to_dict,
    dumps,
    load_config,
    support_to_dict,
)
from .support import ContextPolicy, InvalidPolicy, check_kinematic_axioms, sample_stats, sample_support

EXIT_OK = 0
EXIT_IO = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY = 3
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _write(path, text: str) -> None:
    path = Path(path)
    path.write_text(text, encoding="utf-8")


def _load(path):
    try:
        return load_config(path)
    except (OSError, FormatError) as e:
        print(f"error: cannot load configuration: {e}", file=sys.stderr)
        return None


def cmd_derive(args) -> int:
    settings = OptimizerSettings(args.restarts, args.max_iters, args.penalty, args.tol)
    try:
        config, report = optimize_hardy(args.seed, settings)
    except NoFeasibleConfig as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    score = hardy_score(config, args.penalty)
    echo = {"seed": args.seed, "restarts": args.restarts, "max_iters": args.max_iters, "penalty": args.penalty, "tol": args.tol}
    provenance = "optimize_hardy " + " ".join(f"{k}={v!r}" for k, v in echo.items()) + f" score={score!r}"
    try:
        _write(args.out, dumps(config_to_dict(config, provenance)))
        if args.report:
            payload = dict(condition_report_to_dict(report), score=score)
            _write(args.report, ReportFile("condition", payload, echo).dumps())
    except OSError as e:
        print(f"error: cannot write output: {e}", file=sys.stderr)
        return EXIT_IO
    print(report.format_table())
    print(f"score {score!r}")
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_verify(args) -> int:
    config = _load(args.config)
    if config is None:
        return EXIT_IO
    report = verify_config(config, args.tol)
    print(report.format_table())
    if args.report:
        try:
            _write(args.report, ReportFile("condition", condition_report_to_dict(report), {"tol": args.tol}).dumps())
        except OSError as e:
            print(f"error: cannot write report: {e}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK if report.passed else EXIT_VERIFY


def parse_policy(spec: str) -> ContextPolicy:
    if "," in spec:
        try:
            weights = [float(w) for w in spec.split(",")]
        except ValueError:
            raise InvalidPolicy(f"cannot parse weights {spec!r}") from None
        return ContextPolicy(tuple(weights))
    return ContextPolicy.preset(spec)


def cmd_sample(args) -> int:
    try:
        policy = parse_policy(args.policy)
    except InvalidPolicy as e:
        print(f"error: bad policy: {e}", file=sys.stderr)
        return EXIT_USAGE
    config = _load(args.config)
    if config is None:
        return EXIT_IO
    support = sample_support(config, policy, args.n, args.seed)
    axioms = check_kinematic_axioms(support)
    stats = dict(sample_stats(support), policy=list(policy.weights), axioms=axiom_report_to_dict(axioms))
    echo = {"policy": args.policy, "n": args.n, "seed": args.seed}
    report_path = args.report or str(Path(args.out).with_suffix("")) + ".stats.json"
    try:
        _write(args.out, dumps(support_to_dict(support, f"sample {args.policy} n={args.n} seed={args.seed}")))
        _write(report_path, ReportFile("sample-stats", stats, echo).dumps())
    except OSError as e:
        print(f"error: cannot write output: {e}", file=sys.stderr)
        return EXIT_IO
    for row in stats["contexts"]:
        if not row["count"]:
            continue
        print(f"{row['context']:<10} n={row['count']}")
        for o in row["outcomes"]:
            print(f"    {str(tuple(o['outcome'])):<10} freq {o['frequency']:.6f}   exact {o['exact']:.6f}")
    return EXIT_OK if axioms.passed else EXIT_VERIFY


AUDITS = {
    "prop1": auditor.audit_proposition1,
    "prop2": auditor.audit_proposition2,
    "remark32": auditor.audit_remark_3_2,
}


def cmd_audit(args) -> int:
    config = _load(args.config)
    if config is None:
        return EXIT_IO
    names = list(AUDITS) if args.which == "all" else [args.which]
    try:
        reports = [AUDITS[name](config) for name in names]
    except ConfigRejected as e:
        print(f"error: configuration rejected: {e}", file=sys.stderr)
        return EXIT_VERIFY
    if args.format == "machine":
        print(ReportFile("audit", [audit_report_to_dict(r) for r in reports], {"which": args.which}).dumps(), end="")
    else:
        print("\n\n".join(r.format() for r in reports))
    diffs = []
    for r in reports:
        if not auditor.matches_expectation(r):
            expected = auditor.EXPECTED_VERDICTS[r.proposition].value
            diffs.append(
                f"{r.proposition.value}: expected {expected!r}, got {r.verdict.value!r} "
                f"(invalid steps {r.invalid_steps(direct_only=True)})"
            )
    for d in diffs:
        print(f"verdict mismatch: {d}", file=sys.stderr)
    return EXIT_VERIFY if diffs else EXIT_OK


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardyaudit", description="Hardy configuration search, support sampling and proof audits.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("derive", help="optimize a Hardy configuration and write it as JSON")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--restarts", type=_positive_int, default=32)
    p.add_argument("--max-iters", type=_positive_int, default=4000)
    p.add_argument("--penalty", type=float, default=100.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default="hardy_config.json")
    p.add_argument("--report", help="also write the condition report here")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("verify", help="check the six Hardy conditions on a configuration file")
    p.add_argument("config")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="sample a support and write it with outcome statistics")
    p.add_argument("config")
    p.add_argument("--policy", required=True, help="preset (d1b2, d1, none, uniform, ...) or nine comma-separated weights")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="support.json")
    p.add_argument("--report", help="stats report path (default: <out>.stats.json)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("audit", help="replay the proofs and compare verdicts with the expected ones")
    p.add_argument("config")
    p.add_argument("--which", choices=("prop1", "prop2", "remark32", "all"), default="all")
    p.add_argument("--format", choices=("text", "machine"), default="text")
    p.set_defaults(func=cmd_audit)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
