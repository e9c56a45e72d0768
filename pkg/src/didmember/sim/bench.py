"""Host micro-benchmarks for the four primitive operations.

Results are wall-clock medians on the machine running the code and say
nothing about the constrained target hardware.
"""
from __future__ import annotations

import hashlib
import random
import statistics
import time
from typing import Callable

from pymcl import pairing as raw_pairing

from ..crypto.groups import fr, g2_generator, random_g1, random_g2, random_scalar
from ..errors import InvalidParameter
from .cost import CostModel

MIN_ITERATIONS = 100
# sha256 of 32 bytes is too quick for a single timer read; time it in batches
HASH_BATCH = 200


def _interleaved_medians(ops: dict[str, tuple[Callable[[int], object], int]],
                         iterations: int) -> dict[str, float]:
    """Median ms per op, sampling the ops round-robin.

    Interleaving spreads every op's samples over the whole run, so a burst of
    host load shifts a few samples of each op instead of one op's entire block.
    """
    samples: dict[str, list[float]] = {name: [] for name in ops}
    clock = time.perf_counter
    for i in range(iterations):
        for name, (fn, batch) in ops.items():
            start = clock()
            for _ in range(batch):
                fn(i)
            samples[name].append((clock() - start) * 1e3 / batch)
    return {name: statistics.median(xs) for name, xs in samples.items()}


def bench_primitives(iterations: int = MIN_ITERATIONS, seed: int = 0,
                     include_g2: bool = False) -> dict[str, float]:
    """Median milliseconds for h, m, e and P (and ``m2`` on request)."""
    if iterations < MIN_ITERATIONS:
        raise InvalidParameter(f"need at least {MIN_ITERATIONS} iterations")
    rng = random.Random(seed)
    scalars = [fr(random_scalar(rng)) for _ in range(iterations)]
    p, q = random_g1(rng), random_g2(rng)
    gt = raw_pairing(p, q)
    msgs = [rng.getrandbits(256).to_bytes(32, "big") for _ in range(iterations)]
    points = [p * s for s in scalars]
    # warm up caches and lazy library state
    raw_pairing(p, q), p * scalars[0], gt ** scalars[0]

    ops = {
        "h": (lambda i: hashlib.sha256(msgs[i]).digest(), HASH_BATCH),
        "m": (lambda i: p * scalars[i], 1),
        "e": (lambda i: gt ** scalars[i], 1),
        "P": (lambda i: raw_pairing(points[i], q), 1),
    }
    if include_g2:
        g2 = g2_generator()
        ops["m2"] = (lambda i: g2 * scalars[i], 1)
    return _interleaved_medians(ops, iterations)


def host_model(iterations: int = MIN_ITERATIONS, seed: int = 0) -> CostModel:
    return CostModel(bench_primitives(iterations, seed, include_g2=True))
