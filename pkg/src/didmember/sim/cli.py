"""Command-line entry point: run scenarios, benchmark primitives, print tables."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..errors import DidMemberError
from .bench import MIN_ITERATIONS, bench_primitives
from .cost import TABLE_I, CostModel, emit_table
from .scenario import (
    ScenarioConfig,
    false_accepts,
    format_reports,
    load_report,
    load_script,
    run_scenario,
    save_report,
    verify_all,
)


def _load_model(path: str | None) -> CostModel:
    if path is None:
        return TABLE_I
    return CostModel(json.loads(Path(path).read_text()))


def cmd_run(args: argparse.Namespace) -> int:
    config = ScenarioConfig(args.scheme, args.nodes, load_script(args.script),
                            tree_k=args.tree_size, rng_seed=args.seed,
                            model=_load_model(args.primitives))
    reports = run_scenario(config)
    if args.out:
        save_report(args.out, config, reports)
    if not args.quiet:
        print(format_reports(reports))
    bad = false_accepts(reports)
    print(f"{len(reports)} phase reports; {len(bad)} false accepts", file=sys.stderr)
    return 1 if bad else 0


def cmd_bench(args: argparse.Namespace) -> int:
    times = bench_primitives(args.iterations, include_g2=args.g2)
    print("# host-machine medians (ms); not representative of the target device")
    print(json.dumps(times, indent=1))
    if args.out:
        Path(args.out).write_text(json.dumps(times, indent=1))
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    print(emit_table(args.table, _load_model(args.primitives), args.tree_size))
    return 0


def cmd_verify_counts(args: argparse.Namespace) -> int:
    config, reports = load_report(args.report)
    k = int(config["tree_k"])
    rows = verify_all(reports, k)
    failures = 0
    for report, check in rows:
        failures += not check.match
        expected = "-" if check.expected is None else str(check.expected)
        adjusted = "" if check.adjusted is None else f" (adjusted {check.adjusted})"
        status = "match" if check.match else "MISMATCH"
        print(f"[{status}] event {report.event_index} {report.phase.value} {report.node}: "
              f"{check.formula} expected {expected}{adjusted} actual {check.actual}"
              + (f"  # {check.note}" if check.note else ""))
    print(f"{len(rows) - failures}/{len(rows)} count checks match", file=sys.stderr)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="didmember", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a scenario script")
    run.add_argument("--scheme", choices=("merkle", "bbs"), required=True)
    run.add_argument("--nodes", type=int, required=True)
    run.add_argument("--tree-size", type=int, default=32)
    run.add_argument("--script", required=True)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out")
    run.add_argument("--primitives", help="JSON primitive times for estimated_ms")
    run.add_argument("--quiet", action="store_true", help="do not print the report table")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="time h, m, e, P on this machine")
    bench.add_argument("--iterations", type=int, default=MIN_ITERATIONS)
    bench.add_argument("--g2", action="store_true", help="also time a G2 multiplication")
    bench.add_argument("--out")
    bench.set_defaults(func=cmd_bench)

    est = sub.add_parser("estimate", help="render a cost table")
    est.add_argument("--table", type=int, choices=(1, 2, 3), required=True)
    est.add_argument("--tree-size", type=int, default=32)
    est.add_argument("--primitives", help="JSON primitive times (default: reference values)")
    est.set_defaults(func=cmd_estimate)

    vc = sub.add_parser("verify-counts", help="check a saved report against the formulas")
    vc.add_argument("--report", required=True)
    vc.set_defaults(func=cmd_verify_counts)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DidMemberError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
