"""Nonce-based (mutual) authentication combining DID ownership with membership.

A verifier issues a single-use nonce. The prover answers with its DID, a proof
that the DID belongs to the trusted set (a Merkle path or a BBS group
signature) and a signature under the identity key bound to the DID Document.
"""
from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from . import bbs, merkle
from .bbs import BbsSignature, GroupPrivateKey, GroupPublicKey
from .crypto.counters import OpCounters
from .crypto.hashing import sha256
from .crypto.signing import SigningKeyPair, sign, verify
from .errors import (
    BadSignature,
    DecodeError,
    NotFound,
    StaleList,
    StateMismatch,
    TransportError,
    WrongKind,
)
from .identity import Did, resolve_did
from .ledger import IDX_LIST, Ledger
from .merkle import MembershipPath, NodeMerkleState, TrustedRootsList

NONCE_SIZE = 16
DEFAULT_NONCE_LIFETIME = 60


class Scheme(str, Enum):
    MERKLE = "merkle"
    BBS = "bbs"


_SCHEME_BYTE = {Scheme.MERKLE: 1, Scheme.BBS: 2}


class Reason(str, Enum):
    OK = "Ok"
    BAD_IDENTITY_SIG = "BadIdentitySig"
    UNKNOWN_ROOT = "UnknownRoot"
    BAD_PATH = "BadPath"
    BAD_GROUP_SIG = "BadGroupSig"
    REVOKED_DID = "RevokedDid"
    REPLAYED_NONCE = "ReplayedNonce"
    STALE_ANCHOR = "StaleAnchor"


@dataclass(frozen=True)
class AuthOutcome:
    accepted: bool
    reason: Reason

    def __post_init__(self) -> None:
        if self.accepted and self.reason is not Reason.OK:
            raise ValueError("an accepted outcome must carry reason Ok")

    @classmethod
    def ok(cls) -> "AuthOutcome":
        return cls(True, Reason.OK)

    @classmethod
    def reject(cls, reason: Reason) -> "AuthOutcome":
        return cls(False, reason)


@dataclass(frozen=True)
class Nonce:
    value: bytes
    issued_ts: int


@dataclass(frozen=True)
class AuthResponse:
    did: Did
    scheme: Scheme
    merkle_path: MembershipPath | None = None
    bbs_sig: BbsSignature | None = None
    identity_sig: bytes = b""

    def __post_init__(self) -> None:
        has_path, has_sig = self.merkle_path is not None, self.bbs_sig is not None
        if has_path == has_sig or has_path != (self.scheme is Scheme.MERKLE):
            raise ValueError("exactly one proof matching the scheme must be present")

    def to_bytes(self) -> bytes:
        did = str(self.did).encode("ascii")
        if self.scheme is Scheme.MERKLE:
            body = self.merkle_path.to_bytes()
        else:
            body = struct.pack(">I", self.bbs_sig.epoch) + self.bbs_sig.to_bytes()
        return b"".join([
            bytes([_SCHEME_BYTE[self.scheme]]),
            struct.pack(">H", len(did)), did,
            struct.pack(">I", len(body)), body,
            struct.pack(">H", len(self.identity_sig)), self.identity_sig,
        ])

    @classmethod
    def from_bytes(cls, data: bytes) -> "AuthResponse":
        try:
            scheme = {v: k for k, v in _SCHEME_BYTE.items()}[data[0]]
            off = 1
            (n,) = struct.unpack_from(">H", data, off)
            did = Did.parse(data[off + 2:off + 2 + n].decode("ascii"))
            off += 2 + n
            (n,) = struct.unpack_from(">I", data, off)
            body = data[off + 4:off + 4 + n]
            if len(body) != n:
                raise DecodeError("truncated proof body")
            off += 4 + n
            (n,) = struct.unpack_from(">H", data, off)
            identity_sig = data[off + 2:off + 2 + n]
            if len(identity_sig) != n or off + 2 + n != len(data):
                raise DecodeError("auth response length fields do not match")
        except (IndexError, KeyError, struct.error, UnicodeDecodeError) as exc:
            raise DecodeError(f"auth response does not decode: {exc}") from exc
        if scheme is Scheme.MERKLE:
            return cls(did, scheme, merkle_path=MembershipPath.from_bytes(body),
                       identity_sig=bytes(identity_sig))
        if len(body) < 4:
            raise DecodeError("BBS proof body too short")
        (epoch,) = struct.unpack(">I", body[:4])
        return cls(did, scheme, bbs_sig=BbsSignature.from_bytes(body[4:], epoch),
                   identity_sig=bytes(identity_sig))


@dataclass
class VerifierState:
    """Per-session verifier bookkeeping: outstanding nonces and cached anchors.

    ``clock`` returns the current time in seconds; the simulator plugs in its
    event clock so scenarios stay deterministic.
    """

    rng: random.Random = field(default_factory=random.SystemRandom)
    clock: Callable[[], int] = field(default=lambda: 0)
    nonce_lifetime: int = DEFAULT_NONCE_LIFETIME
    force_fetch: bool = False
    outstanding: dict[bytes, int] = field(default_factory=dict)
    consumed: set[bytes] = field(default_factory=set)
    roots_cache: TrustedRootsList | None = None
    roots_version: int = 0

    def take_nonce(self, nonce: Nonce) -> bool:
        """Consume ``nonce``; True iff it was outstanding, unused and unexpired."""
        issued = self.outstanding.pop(nonce.value, None)
        if issued is None or nonce.value in self.consumed:
            return False
        self.consumed.add(nonce.value)
        return self.clock() - issued <= self.nonce_lifetime

    def trusted_roots(self, ledger: Ledger, pk_tp: bytes) -> TrustedRootsList:
        version = ledger.latest_version(IDX_LIST)
        if self.force_fetch or self.roots_cache is None or version != self.roots_version:
            cached_ts = self.roots_cache.ts if self.roots_cache is not None else None
            self.roots_cache = merkle.fetch_trusted_roots(ledger, pk_tp, cached_ts)
            self.roots_version = version
        return self.roots_cache


def issue_challenge(verifier_state: VerifierState) -> Nonce:
    while True:
        value = verifier_state.rng.getrandbits(8 * NONCE_SIZE).to_bytes(NONCE_SIZE, "big")
        if value not in verifier_state.consumed and value not in verifier_state.outstanding:
            break
    now = verifier_state.clock()
    verifier_state.outstanding[value] = now
    return Nonce(value, now)


def _merkle_message(path: MembershipPath, nonce: Nonce) -> bytes:
    # H((Sib_1, ..., Sib_n) | nonce); digesting for the identity signature belongs
    # to the signature layer and is not charged to the membership counters
    return hashlib.sha256(path.siblings_bytes() + nonce.value).digest()


def _did_digest(did: Did, nonce: Nonce, ctx: OpCounters | None) -> bytes:
    return sha256(str(did).encode("ascii") + nonce.value, ctx)


# ------------------------------------------------------------------ merkle

def merkle_prove(state: NodeMerkleState, keys: SigningKeyPair, did: Did, nonce: Nonce,
                 ctx: OpCounters | None = None, from_secret: bool = True) -> AuthResponse:
    """Build a Merkle membership response for the node's current DID.

    With ``from_secret`` the tree is rebuilt from ``S`` (4k + 1 hashes), as a
    node that stores only its master secret must do.
    """
    tree = state.regenerate(ctx) if from_secret else state.tree(ctx)
    if did.index != state.current_index():
        raise StateMismatch(f"{did} is not the DID of leaf {state.cursor}")
    path = merkle.gen_path(tree, state.cursor)
    return AuthResponse(did, Scheme.MERKLE, merkle_path=path,
                        identity_sig=sign(keys.sk, _merkle_message(path, nonce)))


def _check_identity(resp: AuthResponse, ledger: Ledger, msg: bytes) -> Reason | None:
    try:
        doc = resolve_did(resp.did, ledger)
    except (NotFound, WrongKind, DecodeError):
        return Reason.BAD_IDENTITY_SIG
    if doc.revoked:
        return Reason.REVOKED_DID
    try:
        good = verify(doc.pk_id, msg, resp.identity_sig)
    except DecodeError:
        good = False
    return None if good else Reason.BAD_IDENTITY_SIG


def merkle_verify(resp: AuthResponse, nonce: Nonce, ledger: Ledger, pk_tp: bytes,
                  verifier_state: VerifierState,
                  ctx: OpCounters | None = None) -> AuthOutcome:
    if resp.scheme is not Scheme.MERKLE or resp.merkle_path is None:
        return AuthOutcome.reject(Reason.BAD_PATH)
    if not verifier_state.take_nonce(nonce):
        return AuthOutcome.reject(Reason.REPLAYED_NONCE)
    path = resp.merkle_path
    reason = _check_identity(resp, ledger, _merkle_message(path, nonce))
    if reason is not None:
        return AuthOutcome.reject(reason)
    if not merkle.path_well_formed(path):
        return AuthOutcome.reject(Reason.BAD_PATH)
    try:
        roots = verifier_state.trusted_roots(ledger, pk_tp)
    except (BadSignature, StaleList, NotFound, WrongKind, DecodeError):
        return AuthOutcome.reject(Reason.STALE_ANCHOR)
    root = merkle.recompute_root(resp.did.index, path, ctx)
    if root not in roots.roots:
        return AuthOutcome.reject(Reason.UNKNOWN_ROOT)
    return AuthOutcome.ok()


# --------------------------------------------------------------------- bbs

def bbs_prove(gsk: GroupPrivateKey, gpk: GroupPublicKey, keys: SigningKeyPair, did: Did,
              nonce: Nonce, ctx: OpCounters | None = None,
              rng: random.Random | None = None,
              precompute_ctx: OpCounters | None = None) -> AuthResponse:
    """Group-sign H(DID | nonce) and sign the same digest with the identity key."""
    digest = _did_digest(did, nonce, ctx)
    sig = bbs.bbs_sign(gsk, gpk, digest, ctx, rng, precompute_ctx)
    return AuthResponse(did, Scheme.BBS, bbs_sig=sig, identity_sig=sign(keys.sk, digest))


def bbs_verify_auth(resp: AuthResponse, nonce: Nonce, gpk: GroupPublicKey, ledger: Ledger,
                    verifier_state: VerifierState, ctx: OpCounters | None = None,
                    precompute_ctx: OpCounters | None = None) -> AuthOutcome:
    if resp.scheme is not Scheme.BBS or resp.bbs_sig is None:
        return AuthOutcome.reject(Reason.BAD_GROUP_SIG)
    if not verifier_state.take_nonce(nonce):
        return AuthOutcome.reject(Reason.REPLAYED_NONCE)
    try:
        pending = bbs.published_revocations(ledger) > gpk.epoch
    except DecodeError:
        pending = True
    if pending:
        return AuthOutcome.reject(Reason.STALE_ANCHOR)
    digest = _did_digest(resp.did, nonce, ctx)
    if not bbs.bbs_verify(gpk, digest, resp.bbs_sig, ctx, precompute_ctx):
        return AuthOutcome.reject(Reason.BAD_GROUP_SIG)
    reason = _check_identity(resp, ledger, digest)
    if reason is not None:
        return AuthOutcome.reject(reason)
    return AuthOutcome.ok()


# ------------------------------------------------------------------- nodes

@dataclass
class Node:
    """A network participant: identity keys, DID, membership material, verifier state."""

    name: str
    ledger: Ledger
    keys: SigningKeyPair
    did: Did
    pk_tp: bytes
    verifier: VerifierState
    merkle_state: NodeMerkleState | None = None
    gsk: GroupPrivateKey | None = None
    gpk: GroupPublicKey | None = None
    # public key used when verifying others, if it has moved past ``gpk``
    # (a revoked member can still follow the public updates)
    verifier_gpk: GroupPublicKey | None = None
    rng: random.Random = field(default_factory=random.SystemRandom)

    @property
    def view_gpk(self) -> GroupPublicKey | None:
        return self.verifier_gpk or self.gpk

    def prove(self, scheme: Scheme, nonce: Nonce, ctx: OpCounters | None = None,
              precompute_ctx: OpCounters | None = None) -> AuthResponse:
        if scheme is Scheme.MERKLE:
            if self.merkle_state is None:
                raise StateMismatch(f"{self.name} has no Merkle state")
            return merkle_prove(self.merkle_state, self.keys, self.did, nonce, ctx)
        if self.gsk is None or self.gpk is None:
            raise StateMismatch(f"{self.name} has no group key")
        return bbs_prove(self.gsk, self.gpk, self.keys, self.did, nonce, ctx, self.rng,
                         precompute_ctx)

    def check(self, scheme: Scheme, resp: AuthResponse, nonce: Nonce,
              ctx: OpCounters | None = None,
              precompute_ctx: OpCounters | None = None) -> AuthOutcome:
        if resp.scheme is not scheme:
            return AuthOutcome.reject(
                Reason.BAD_PATH if scheme is Scheme.MERKLE else Reason.BAD_GROUP_SIG)
        if scheme is Scheme.MERKLE:
            return merkle_verify(resp, nonce, self.ledger, self.pk_tp, self.verifier, ctx)
        if self.view_gpk is None:
            return AuthOutcome.reject(Reason.STALE_ANCHOR)
        return bbs_verify_auth(resp, nonce, self.view_gpk, self.ledger, self.verifier, ctx,
                               precompute_ctx)


def transmit(resp: AuthResponse) -> AuthResponse:
    """In-process transport: encode and decode through the wire format."""
    try:
        return AuthResponse.from_bytes(resp.to_bytes())
    except (DecodeError, ValueError, struct.error) as exc:
        raise TransportError(f"response could not be carried: {exc}") from exc


def authenticate(prover: Node, verifier: Node, scheme: Scheme,
                 prover_ctx: OpCounters | None = None,
                 verifier_ctx: OpCounters | None = None) -> tuple[AuthOutcome, AuthResponse, Nonce]:
    """One direction: ``verifier`` challenges and checks ``prover``."""
    nonce = issue_challenge(verifier.verifier)
    resp = transmit(prover.prove(scheme, nonce, prover_ctx))
    return verifier.check(scheme, resp, nonce, verifier_ctx), resp, nonce


def mutual_authenticate(node_a: Node, node_b: Node,
                        scheme: Scheme) -> tuple[AuthOutcome, AuthOutcome]:
    """Run both directions; returns (outcome for a as seen by b, outcome for b as seen by a)."""
    a_seen_by_b, _, _ = authenticate(node_a, node_b, scheme)
    b_seen_by_a, _, _ = authenticate(node_b, node_a, scheme)
    return a_seen_by_b, b_seen_by_a
