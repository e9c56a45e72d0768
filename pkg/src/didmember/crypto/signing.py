"""Identity and TP signatures (Ed25519).

Ed25519 is a deterministic Schnorr-type signature at the 128-bit level. Keys are
carried as raw bytes: a 32-byte seed and a 32-byte public key.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature as _CryptoInvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

from ..errors import DecodeError

SECRET_KEY_SIZE = 32
PUBLIC_KEY_SIZE = 32
SIGNATURE_SIZE = 64


@dataclass(frozen=True)
class SigningKeyPair:
    sk: bytes
    pk: bytes

    @classmethod
    def from_seed(cls, seed: bytes) -> "SigningKeyPair":
        if len(seed) != SECRET_KEY_SIZE:
            raise DecodeError("signing seed must be 32 bytes")
        priv = Ed25519PrivateKey.from_private_bytes(seed)
        pk = priv.public_key().public_bytes(Encoding.Raw, PublicFormat.Raw)
        return cls(sk=bytes(seed), pk=pk)

    @classmethod
    def generate(cls, rng: random.Random | None = None) -> "SigningKeyPair":
        if rng is None:
            rng = random.SystemRandom()
        return cls.from_seed(rng.getrandbits(256).to_bytes(32, "big"))

    def __repr__(self) -> str:
        return f"SigningKeyPair(pk={self.pk.hex()[:16]}...)"


def sign(sk: bytes, msg: bytes) -> bytes:
    if len(sk) != SECRET_KEY_SIZE:
        raise DecodeError("secret key must be 32 bytes")
    return Ed25519PrivateKey.from_private_bytes(sk).sign(msg)


def verify(pk: bytes, msg: bytes, sig: bytes) -> bool:
    if len(pk) != PUBLIC_KEY_SIZE or len(sig) != SIGNATURE_SIZE:
        raise DecodeError("malformed public key or signature length")
    try:
        key = Ed25519PublicKey.from_public_bytes(pk)
    except ValueError as exc:
        raise DecodeError(f"public key does not decode: {exc}") from exc
    try:
        key.verify(sig, msg)
    except _CryptoInvalidSignature:
        return False
    return True
