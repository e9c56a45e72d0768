#!/usr/bin/env python3
"""Run the four-phase scenario for both schemes and summarise the outcomes.

``--emit DIR`` writes the generated scripts as text files instead, in the
format accepted by ``didmember run --script``.
"""
import argparse
from collections import Counter
from pathlib import Path

from didmember.sim.scenario import (
    ScenarioConfig,
    adversarial,
    false_accepts,
    four_phase_script,
    run_scenario,
    save_report,
    verify_all,
)


def emit(directory: Path, nodes: int, k: int, attacks: int) -> None:
    directory.mkdir(parents=True, exist_ok=True)
    for scheme in ("merkle", "bbs"):
        events = four_phase_script(scheme, nodes, k, attacks)
        path = directory / f"four_phase_{scheme}.txt"
        path.write_text("# generated by scripts/four_phase.py --emit\n"
                        + "\n".join(map(str, events)) + "\n")
        print(f"wrote {path} ({len(events)} events)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--nodes", type=int, default=8)
    parser.add_argument("--tree-size", type=int, default=32)
    parser.add_argument("--attacks", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--emit", type=Path, metavar="DIR")
    parser.add_argument("--out-dir", type=Path, help="save both JSON reports here")
    args = parser.parse_args()

    if args.emit:
        emit(args.emit, args.nodes, args.tree_size, args.attacks)
        return

    for scheme in ("merkle", "bbs"):
        config = ScenarioConfig(scheme, args.nodes,
                                four_phase_script(scheme, args.nodes, args.tree_size,
                                                  args.attacks),
                                tree_k=args.tree_size, rng_seed=args.seed)
        reports = run_scenario(config)
        outcomes = Counter((r.label.split(":")[0], r.outcome) for r in reports
                           if r.outcome is not None)
        attempts = sum(adversarial(r) for r in reports)
        mismatches = sum(not c.match for _, c in verify_all(reports, args.tree_size))
        print(f"== {scheme}: {len(reports)} phase reports ==")
        for (label, outcome), n in sorted(outcomes.items()):
            print(f"  {label:<20} {outcome:<16} {n}")
        print(f"  false accepts: {len(false_accepts(reports))} of {attempts} adversarial")
        print(f"  count mismatches: {mismatches}")
        if args.out_dir:
            args.out_dir.mkdir(parents=True, exist_ok=True)
            save_report(args.out_dir / f"four_phase_{scheme}.json", config, reports)


if __name__ == "__main__":
    main()
