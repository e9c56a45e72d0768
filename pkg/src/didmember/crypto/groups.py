"""BLS12-381 group arithmetic with operation accounting.

Point and field arithmetic is delegated to mcl through ``pymcl``. Scalars are
plain Python ints reduced modulo the group order ``ORDER``. The library writes
G1/G2 additively and GT multiplicatively; callers here follow the same
convention.

Multi-scalar multiplication and multi-exponentiation use the simultaneous
(generalised Shamir) method: one shared double/square chain over the longest
exponent plus a ``2**l`` table of subset products.
"""
from __future__ import annotations

import random
from typing import Callable, Sequence, TypeVar

import pymcl
from pymcl import G1, G2, GT, Fr

from ..errors import InvalidParameter, InvalidPoint
from .counters import OpCounters

ORDER: int = pymcl.r
G1_SIZE = 48
G2_SIZE = 96
SCALAR_SIZE = 32

G1Point = G1
G2Point = G2
GTElement = GT

T = TypeVar("T")


def fr(k: int) -> Fr:
    return Fr(str(k % ORDER))


def random_scalar(rng: random.Random | None = None, nonzero: bool = True) -> int:
    rng = rng or random.SystemRandom()
    return rng.randrange(1 if nonzero else 0, ORDER)


def inverse(k: int) -> int:
    k %= ORDER
    if k == 0:
        raise ZeroDivisionError("zero has no inverse mod the group order")
    return pow(k, -1, ORDER)


def g1_generator() -> G1:
    return G1(str(pymcl.g1), 10)


def g2_generator() -> G2:
    return G2(str(pymcl.g2), 10)


def g1_identity() -> G1:
    return G1()


def gt_identity() -> GT:
    return GT()


def random_g1(rng: random.Random | None = None) -> G1:
    return pymcl.g1 * fr(random_scalar(rng))


def random_g2(rng: random.Random | None = None) -> G2:
    return pymcl.g2 * fr(random_scalar(rng))


# ---------------------------------------------------------------- single ops

def g1_mul(p: G1, k: int, ctx: OpCounters | None = None) -> G1:
    if ctx is not None:
        ctx.g1_mul_count += 1
    return p * fr(k)


def g2_mul(q: G2, k: int, ctx: OpCounters | None = None) -> G2:
    if ctx is not None:
        ctx.g2_mul_count += 1
    return q * fr(k)


def gt_exp(e: GT, k: int, ctx: OpCounters | None = None) -> GT:
    if ctx is not None:
        ctx.gt_exp_count += 1
    return e ** fr(k)


def pairing(a: G1, b: G2, ctx: OpCounters | None = None) -> GT:
    if not isinstance(a, G1) or not isinstance(b, G2):
        raise InvalidPoint("pairing expects (G1, G2) elements")
    if ctx is not None:
        ctx.pairing_count += 1
    return pymcl.pairing(a, b)


# ------------------------------------------------------------ multi-scalar

def _simultaneous(bases: Sequence[T], exps: Sequence[int], one: T,
                  mul: Callable[[T, T], T], sqr: Callable[[T], T]) -> T:
    n = len(bases)
    exps = [e % ORDER for e in exps]
    table = [one] * (1 << n)
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        prev = mask & (mask - 1)
        table[mask] = bases[low] if prev == 0 else mul(table[prev], bases[low])
    acc = one
    started = False
    for bit in range(max(e.bit_length() for e in exps) - 1, -1, -1):
        if started:
            acc = sqr(acc)
        idx = 0
        for i, e in enumerate(exps):
            if (e >> bit) & 1:
                idx |= 1 << i
        if idx:
            acc = table[idx] if not started else mul(acc, table[idx])
            started = True
    return acc


def _check_lengths(bases: Sequence, scalars: Sequence[int]) -> int:
    n = len(bases)
    if n < 1 or n != len(scalars):
        raise InvalidParameter(f"need equal, non-empty lists (got {n} and {len(scalars)})")
    return n


def multi_scalar_mul(points: Sequence[G1], scalars: Sequence[int],
                     ctx: OpCounters | None = None) -> G1:
    """Return ``sum(scalars[i] * points[i])`` in G1, counted as one ``l*m`` term."""
    n = _check_lengths(points, scalars)
    if n == 1:
        return g1_mul(points[0], scalars[0], ctx)
    if ctx is not None:
        ctx.multi_mul_profile[n] += 1
    return _simultaneous(points, scalars, G1(), lambda a, b: a + b, lambda a: a + a)


def multi_scalar_mul_g2(points: Sequence[G2], scalars: Sequence[int],
                        ctx: OpCounters | None = None) -> G2:
    n = _check_lengths(points, scalars)
    if n == 1:
        return g2_mul(points[0], scalars[0], ctx)
    if ctx is not None:
        ctx.multi_mul_g2_profile[n] += 1
    return _simultaneous(points, scalars, G2(), lambda a, b: a + b, lambda a: a + a)


def multi_exp_gt(elements: Sequence[GT], scalars: Sequence[int],
                 ctx: OpCounters | None = None) -> GT:
    """Return ``prod(elements[i] ** scalars[i])`` in GT, counted as one ``l*e`` term."""
    n = _check_lengths(elements, scalars)
    if n == 1:
        return gt_exp(elements[0], scalars[0], ctx)
    if ctx is not None:
        ctx.multi_exp_profile[n] += 1
    return _simultaneous(elements, scalars, GT(), lambda a, b: a * b, lambda a: a * a)


# ---------------------------------------------------------------- encodings

def encode_scalar(k: int) -> bytes:
    return (k % ORDER).to_bytes(SCALAR_SIZE, "big")


def decode_scalar(data: bytes) -> int:
    if len(data) != SCALAR_SIZE:
        raise InvalidParameter("scalar encoding must be 32 bytes")
    k = int.from_bytes(data, "big")
    if k >= ORDER:
        raise InvalidParameter("scalar encoding is not reduced")
    return k


def hash_to_scalar(digest: bytes) -> int:
    return int.from_bytes(digest, "big") % ORDER


def encode_g1(p: G1) -> bytes:
    return bytes(p.serialize())


def encode_g2(q: G2) -> bytes:
    return bytes(q.serialize())


def encode_gt(e: GT) -> bytes:
    # transient use only (hash inputs)
    return bytes(e.serialize())


def decode_g1(data: bytes) -> G1:
    if len(data) != G1_SIZE:
        raise InvalidPoint(f"G1 encoding must be {G1_SIZE} bytes")
    try:
        return G1.deserialize(bytes(data))
    except (ValueError, RuntimeError) as exc:
        raise InvalidPoint(f"not a G1 subgroup element: {exc}") from exc


def decode_g2(data: bytes) -> G2:
    if len(data) != G2_SIZE:
        raise InvalidPoint(f"G2 encoding must be {G2_SIZE} bytes")
    try:
        return G2.deserialize(bytes(data))
    except (ValueError, RuntimeError) as exc:
        raise InvalidPoint(f"not a G2 subgroup element: {exc}") from exc
