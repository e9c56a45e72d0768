"""SHA-256, HMAC-SHA256 and HKDF with hash accounting.

Each HMAC is charged as two hash computations (inner and outer), which is how
the HKDF cost of ``2 + 2k`` hashes for ``k`` seeds comes about.
"""
from __future__ import annotations

import hashlib
import hmac

from ..errors import InvalidParameter
from .counters import OpCounters

DIGEST_SIZE = 32
# HKDF-Expand emits at most 255 blocks
MAX_SEEDS = 255


def sha256(data: bytes, ctx: OpCounters | None = None) -> bytes:
    if ctx is not None:
        ctx.hash_count += 1
    return hashlib.sha256(data).digest()


def hmac_sha256(key: bytes, msg: bytes, ctx: OpCounters | None = None) -> bytes:
    if ctx is not None:
        ctx.hash_count += 2
    return hmac.new(key, msg, hashlib.sha256).digest()


def hkdf_extract(salt: bytes, master: bytes, ctx: OpCounters | None = None) -> bytes:
    if not salt:
        salt = bytes(DIGEST_SIZE)
    return hmac_sha256(salt, master, ctx)


def hkdf_expand_blocks(prk: bytes, info: bytes, n_blocks: int,
                       ctx: OpCounters | None = None) -> list[bytes]:
    blocks: list[bytes] = []
    prev = b""
    for i in range(1, n_blocks + 1):
        prev = hmac_sha256(prk, prev + info + bytes([i]), ctx)
        blocks.append(prev)
    return blocks


def hkdf_seeds(master: bytes, salt: bytes, info: bytes, k: int,
               ctx: OpCounters | None = None) -> list[bytes]:
    """Derive ``k`` independent 32-byte seeds from one master secret.

    The seeds are the consecutive HKDF-Expand output blocks T(1)..T(k), so the
    concatenation equals ``HKDF(master, salt, info, 32 * k)``.
    """
    if k < 1 or k > MAX_SEEDS:
        raise InvalidParameter(f"k must be in [1, {MAX_SEEDS}], got {k}")
    prk = hkdf_extract(salt, master, ctx)
    return hkdf_expand_blocks(prk, info, k, ctx)
