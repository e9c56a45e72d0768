#!/usr/bin/env python3
"""Benchmark h, m, e, P on this machine and compare the two schemes under it.

Writes the medians as JSON (usable with ``didmember estimate --primitives``)
and prints each phase's estimated Merkle/BBS ratio plus a direct wall-clock
comparison of the two verifiers.
"""
import argparse
import hashlib
import json
import random
import statistics
import time
from pathlib import Path

from didmember import bbs, merkle
from didmember.auth import Scheme
from didmember.sim.bench import bench_primitives
from didmember.sim.cost import TABLE_PHASES, CostModel, estimate_time


def median_ms(fn, n):
    out = []
    for _ in range(n):
        start = time.perf_counter()
        fn()
        out.append((time.perf_counter() - start) * 1e3)
    return statistics.median(out)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--iterations", type=int, default=300)
    parser.add_argument("--tree-size", type=int, default=32)
    parser.add_argument("--out", type=Path, default=Path("host_primitives.json"))
    args = parser.parse_args()

    times = bench_primitives(args.iterations, include_g2=True)
    args.out.write_text(json.dumps(times, indent=1))
    print(f"host medians (ms), written to {args.out}:")
    for k, v in times.items():
        print(f"  {k:>2} = {v:.5f}")

    model = CostModel(times)
    print(f"\nestimated phase times on this host, k={args.tree_size}:")
    for phase in TABLE_PHASES:
        m = estimate_time(Scheme.MERKLE, phase, args.tree_size, model)
        b = estimate_time(Scheme.BBS, phase, args.tree_size, model)
        ratio = f"{b / m:8.0f}x" if m else "     inf"
        print(f"  {phase.value:<20} merkle {m:9.4f}  bbs {b:9.3f}  {ratio}")

    rng = random.Random(0)
    idx = [rng.randbytes(32) for _ in range(args.tree_size)]
    tree = merkle.build_tree(idx)
    path = merkle.gen_path(tree, 0)
    gpk, tpsk = bbs.keygen(rng=rng)
    gsk = bbs.join(tpsk, gpk, "bench", rng=rng)
    digest = hashlib.sha256(b"bench").digest()
    sig = bbs.bbs_sign(gsk, gpk, digest, rng=rng)
    bbs.bbs_verify(gpk, digest, sig)
    mv = median_ms(lambda: merkle.verify_path(idx[0], path, tree.root), 501)
    bv = median_ms(lambda: bbs.bbs_verify(gpk, digest, sig), 51)
    print(f"\nmeasured verify: merkle {mv:.4f} ms, bbs {bv:.3f} ms ({bv / mv:.0f}x)")


if __name__ == "__main__":
    main()
