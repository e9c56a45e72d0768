#!/usr/bin/env python3
"""Print the primitive-time table and both phase-cost tables.

With ``--host`` the tables are re-evaluated with primitive times measured on
this machine, next to the reference values.
"""
import argparse

from didmember.sim.bench import host_model
from didmember.sim.cost import TABLE_I, emit_tables


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tree-size", type=int, default=32)
    parser.add_argument("--host", action="store_true", help="also use host-measured times")
    parser.add_argument("--iterations", type=int, default=200)
    args = parser.parse_args()

    print("== reference primitive times ==\n")
    print(emit_tables(TABLE_I, args.tree_size))
    if args.host:
        print("\n== host-measured primitive times (this machine only) ==\n")
        print(emit_tables(host_model(args.iterations), args.tree_size))


if __name__ == "__main__":
    main()
