"""BBS group signatures with strong exculpability.

The member key is ``gsk = (A, x, y)`` with the key relation

    e(A, w * g2^x) = e(g1 * h1^-y, g2)

where ``y`` is chosen by the member and never revealed: during the join the TP
only sees ``Y = h1^-y`` and ``B = H^-y``. Signatures are a Fiat-Shamir proof of
knowledge of ``(A, x, y)`` under the linear encryption ``(T1, T2, T3)`` of
``A``, so the TP (who knows ``xi1, xi2``) can open them, but cannot produce
one without ``y``.

Revocation follows the update-based scheme: the TP publishes, per revoked
member, ``x_r`` together with the bases ``g1, h1, g2`` raised to
``1 / (gamma + x_r)``. Every other member moves its ``A`` to the new bases; the
revoked member cannot, because its update would divide by ``x - x_r = 0``.

Notation follows the library: G1/G2 additive, GT multiplicative. A "G1
multiplication" below is a scalar multiplication.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import NamedTuple

from pymcl import G1, G2, GT

from .crypto.counters import OpCounters
from .crypto.groups import (
    G1_SIZE,
    G2_SIZE,
    ORDER,
    SCALAR_SIZE,
    decode_g1,
    decode_g2,
    decode_scalar,
    encode_g1,
    encode_g2,
    encode_gt,
    encode_scalar,
    g1_mul,
    g2_generator,
    g2_mul,
    fr,
    hash_to_scalar,
    inverse,
    multi_exp_gt,
    multi_scalar_mul,
    multi_scalar_mul_g2,
    pairing,
    random_g1,
    random_scalar,
)
from .crypto.hashing import sha256
from .crypto.signing import SigningKeyPair, sign, verify
from .errors import (
    AlreadyRevoked,
    BadSignature,
    DecodeError,
    InvalidPoint,
    InvalidSignature,
    NotFound,
    ProtocolOrder,
    RevokedKey,
    StaleKey,
    StaleList,
    StaleTimestamp,
    UnknownMember,
    UnknownSigner,
    WrongKind,
)
from .ledger import INDEX_RL, Ledger, LedgerRecord, RecordKind, decode_payload, encode_payload


class PairingConstants(NamedTuple):
    """Per-epoch GT values that let sign use no pairing and verify use one."""

    e_h_w: GT
    e_h_g2: GT
    e_h1_g2: GT
    e_g1_g2: GT


@dataclass(frozen=True)
class GroupPublicKey:
    g1: G1
    g2: G2
    h: G1
    h1: G1
    u: G1
    v: G1
    w: G2
    epoch: int = 0

    def constants(self, ctx: OpCounters | None = None) -> PairingConstants:
        """Pairing constants for this epoch, computed on first use (4 pairings).

        Only the first call is charged to ``ctx``; later calls are free.
        """
        cached = self.__dict__.get("_constants")
        if cached is None:
            cached = PairingConstants(
                pairing(self.h, self.w, ctx),
                pairing(self.h, self.g2, ctx),
                pairing(self.h1, self.g2, ctx),
                pairing(self.g1, self.g2, ctx),
            )
            object.__setattr__(self, "_constants", cached)
        return cached

    def to_bytes(self) -> bytes:
        return (b"".join(encode_g1(p) for p in (self.g1, self.h, self.h1, self.u, self.v))
                + encode_g2(self.g2) + encode_g2(self.w) + self.epoch.to_bytes(4, "big"))

    @classmethod
    def from_bytes(cls, data: bytes) -> "GroupPublicKey":
        if len(data) != 5 * G1_SIZE + 2 * G2_SIZE + 4:
            raise DecodeError("group public key has a bad length")
        g1s = [decode_g1(data[i * G1_SIZE:(i + 1) * G1_SIZE]) for i in range(5)]
        off = 5 * G1_SIZE
        g2 = decode_g2(data[off:off + G2_SIZE])
        w = decode_g2(data[off + G2_SIZE:off + 2 * G2_SIZE])
        epoch = int.from_bytes(data[-4:], "big")
        g1, h, h1, u, v = g1s
        return cls(g1, g2, h, h1, u, v, w, epoch)


@dataclass
class MemberRecord:
    A: G1
    x: int
    revoked: bool = False


@dataclass
class TpGroupSecret:
    gamma: int
    xi1: int
    xi2: int
    member_registry: dict[str, MemberRecord] = field(default_factory=dict)
    revocations: list["RevocationEntry"] = field(default_factory=list)
    last_rl_ts: int = -1

    def __repr__(self) -> str:
        return f"TpGroupSecret(members={len(self.member_registry)}, revoked={len(self.revocations)})"


@dataclass(frozen=True)
class GroupPrivateKey:
    A: G1
    x: int
    y: int
    epoch: int = 0

    def e_a_g2(self, gpk: GroupPublicKey, ctx: OpCounters | None = None) -> GT:
        """e(A, g2) for this key's epoch, cached after the first (charged) pairing."""
        cached = self.__dict__.get("_e_a_g2")
        if cached is None:
            cached = pairing(self.A, gpk.g2, ctx)
            object.__setattr__(self, "_e_a_g2", cached)
        return cached

    def __repr__(self) -> str:
        return f"GroupPrivateKey(epoch={self.epoch})"


@dataclass(frozen=True)
class BbsSignature:
    T1: G1
    T2: G1
    T3: G1
    c: int
    s_alpha: int
    s_beta: int
    s_x: int
    s_delta1: int
    s_delta2: int
    s_y: int
    epoch: int = 0  # not on the wire; set by the transport

    SCALAR_FIELDS = ("c", "s_alpha", "s_beta", "s_x", "s_delta1", "s_delta2", "s_y")
    WIRE_SIZE = 3 * G1_SIZE + 7 * SCALAR_SIZE

    def to_bytes(self) -> bytes:
        return (encode_g1(self.T1) + encode_g1(self.T2) + encode_g1(self.T3)
                + b"".join(encode_scalar(getattr(self, f)) for f in self.SCALAR_FIELDS))

    @classmethod
    def from_bytes(cls, data: bytes, epoch: int = 0) -> "BbsSignature":
        if len(data) != cls.WIRE_SIZE:
            raise DecodeError("BBS signature has a bad length")
        pts = [decode_g1(data[i * G1_SIZE:(i + 1) * G1_SIZE]) for i in range(3)]
        off = 3 * G1_SIZE
        scalars = [decode_scalar(data[off + i * SCALAR_SIZE:off + (i + 1) * SCALAR_SIZE])
                   for i in range(7)]
        return cls(*pts, *scalars, epoch=epoch)


@dataclass(frozen=True)
class RevocationEntry:
    x_r: int
    A_r: G1
    g1_hat: G1
    h1_hat: G1
    g2_hat: G2
    epoch: int  # gpk epoch the entry applies to (its position in the list)

    def signing_bytes(self) -> bytes:
        return (encode_scalar(self.x_r) + encode_g1(self.A_r) + encode_g1(self.g1_hat)
                + encode_g1(self.h1_hat) + encode_g2(self.g2_hat))


@dataclass(frozen=True)
class RevocationList:
    entries: tuple[RevocationEntry, ...]
    ts: int
    signature: bytes = b""

    def signing_bytes(self) -> bytes:
        return b"".join(e.signing_bytes() for e in self.entries) + self.ts.to_bytes(8, "big")

    def signed_by(self, pk_tp: bytes) -> bool:
        try:
            return verify(pk_tp, self.signing_bytes(), self.signature)
        except DecodeError:
            return False

    def to_payload(self) -> bytes:
        return encode_payload({
            "entries": [e.signing_bytes().hex() for e in self.entries],
            "ts": self.ts,
            "signature": self.signature.hex(),
        })

    @classmethod
    def from_payload(cls, payload: bytes) -> "RevocationList":
        obj = decode_payload(RecordKind.REVOCATION_LIST, payload)
        size = SCALAR_SIZE + 3 * G1_SIZE + G2_SIZE
        entries = []
        try:
            for epoch, item in enumerate(obj["entries"]):
                raw = bytes.fromhex(item)
                if len(raw) != size:
                    raise DecodeError("revocation entry has a bad length")
                o = SCALAR_SIZE
                entries.append(RevocationEntry(
                    x_r=decode_scalar(raw[:o]),
                    A_r=decode_g1(raw[o:o + G1_SIZE]),
                    g1_hat=decode_g1(raw[o + G1_SIZE:o + 2 * G1_SIZE]),
                    h1_hat=decode_g1(raw[o + 2 * G1_SIZE:o + 3 * G1_SIZE]),
                    g2_hat=decode_g2(raw[o + 3 * G1_SIZE:]),
                    epoch=epoch,
                ))
            signature = bytes.fromhex(obj["signature"])
        except (TypeError, ValueError) as exc:
            raise DecodeError(f"revocation list does not decode: {exc}") from exc
        return cls(tuple(entries), int(obj["ts"]), signature)


# ----------------------------------------------------------------- keygen

def keygen(ctx: OpCounters | None = None,
           rng: random.Random | None = None) -> tuple[GroupPublicKey, TpGroupSecret]:
    """Group key generation with the extra base ``h1`` needed for exculpability."""
    rng = rng or random.SystemRandom()
    g2 = g2_mul(g2_generator(), random_scalar(rng))
    g1 = random_g1(rng)
    h = random_g1(rng)
    h1 = random_g1(rng)
    xi1, xi2 = random_scalar(rng), random_scalar(rng)
    u = g1_mul(h, inverse(xi1), ctx)
    v = g1_mul(h, inverse(xi2), ctx)
    gamma = random_scalar(rng)
    w = g2_mul(g2, gamma, ctx)
    return GroupPublicKey(g1, g2, h, h1, u, v, w, 0), TpGroupSecret(gamma, xi1, xi2)


def key_relation_holds(gsk: GroupPrivateKey, gpk: GroupPublicKey,
                       ctx: OpCounters | None = None) -> bool:
    """Check e(A, w * g2^x) * e(h1, g2)^y == e(g1, g2)."""
    lhs = (pairing(gsk.A, gpk.w + g2_mul(gpk.g2, gsk.x, ctx), ctx)
           * pairing(g1_mul(gpk.h1, gsk.y, ctx), gpk.g2, ctx))
    return lhs == pairing(gpk.g1, gpk.g2, ctx)


# ------------------------------------------------------------------- join

class JoinStatus(str, Enum):
    STARTED = "Started"
    CHALLENGED = "Challenged"
    RESPONDED = "Responded"
    ACCEPTED = "Accepted"
    REJECTED = "Rejected"


@dataclass
class JoinTranscript:
    """TP-side view of one join: everything the TP ever sees."""

    Y: G1
    member_id: str = ""
    x: int | None = None
    A: G1 | None = None
    H: G1 | None = None
    B: G1 | None = None
    status: JoinStatus = JoinStatus.STARTED

    def record_challenge(self, x: int, A: G1, H: G1) -> None:
        if self.status is not JoinStatus.STARTED:
            raise ProtocolOrder(f"cannot challenge a transcript in state {self.status.value}")
        self.x, self.A, self.H = x, A, H
        self.status = JoinStatus.CHALLENGED

    def record_answer(self, B: G1) -> None:
        if self.status is not JoinStatus.CHALLENGED:
            raise ProtocolOrder(f"cannot answer a transcript in state {self.status.value}")
        self.B = B
        self.status = JoinStatus.RESPONDED


def join_node_start(gpk: GroupPublicKey, ctx: OpCounters | None = None,
                    rng: random.Random | None = None,
                    y: int | None = None) -> tuple[int, G1]:
    """Step 1: the node picks its secret share y in Z*_p and sends Y = h1^-y."""
    if y is None:
        y = random_scalar(rng)
    if y % ORDER == 0:
        raise ValueError("y must be a nonzero scalar")
    return y, g1_mul(gpk.h1, -y, ctx)


def join_tp_respond(tpsk: TpGroupSecret, gpk: GroupPublicKey, Y: G1 | bytes,
                    ctx: OpCounters | None = None,
                    rng: random.Random | None = None) -> tuple[int, G1, G1]:
    """Step 2: TP picks x and computes A = (g1 Y)^(1/(gamma+x)) and H = h1^(1/(gamma+x)).

    Only H goes back to the node; A is withheld until the answer checks out.
    """
    if isinstance(Y, (bytes, bytearray)):
        Y = decode_g1(Y)
    if not isinstance(Y, G1) or Y.is_zero():
        raise InvalidPoint("Y must be a non-identity G1 element")
    rng = rng or random.SystemRandom()
    taken = {rec.x for rec in tpsk.member_registry.values()}
    while True:
        x = random_scalar(rng)
        if (tpsk.gamma + x) % ORDER and x not in taken:
            break
    inv = inverse(tpsk.gamma + x)
    A = g1_mul(gpk.g1 + Y, inv, ctx)
    H = g1_mul(gpk.h1, inv, ctx)
    return x, A, H


def join_node_answer(H: G1, y: int, ctx: OpCounters | None = None) -> G1:
    """Step 3: B = H^-y, which equals A / g1^(1/(gamma+x)) for an honest node."""
    return g1_mul(H, -y, ctx)


def join_tp_finalize(tpsk: TpGroupSecret, gpk: GroupPublicKey, transcript: JoinTranscript,
                     ctx: OpCounters | None = None) -> bool:
    """Steps 4-5: accept iff B * g1^(1/(gamma+x)) == A; register (A, x) on accept."""
    if transcript.status is not JoinStatus.RESPONDED:
        raise ProtocolOrder(f"cannot finalize a transcript in state {transcript.status.value}")
    a_check = transcript.B + g1_mul(gpk.g1, inverse(tpsk.gamma + transcript.x), ctx)
    if a_check != transcript.A:
        transcript.status = JoinStatus.REJECTED
        return False
    transcript.status = JoinStatus.ACCEPTED
    if transcript.member_id:
        tpsk.member_registry[transcript.member_id] = MemberRecord(transcript.A, transcript.x)
    return True


def assemble_key(A: G1, x: int, y: int, gpk: GroupPublicKey) -> GroupPrivateKey:
    """Step 6: the node combines the released (A, x) with its own y."""
    return GroupPrivateKey(A, x, y, gpk.epoch)


def join(tpsk: TpGroupSecret, gpk: GroupPublicKey, member_id: str,
         node_ctx: OpCounters | None = None, tp_ctx: OpCounters | None = None,
         rng: random.Random | None = None) -> GroupPrivateKey:
    """Run the whole six-step join honestly; raises if the TP rejects."""
    if member_id in tpsk.member_registry:
        raise ValueError(f"member {member_id!r} already joined")
    y, Y = join_node_start(gpk, node_ctx, rng)
    transcript = JoinTranscript(Y, member_id)
    transcript.record_challenge(*join_tp_respond(tpsk, gpk, Y, tp_ctx, rng))
    transcript.record_answer(join_node_answer(transcript.H, y, node_ctx))
    if not join_tp_finalize(tpsk, gpk, transcript, tp_ctx):
        raise InvalidSignature("join transcript rejected")
    return assemble_key(transcript.A, transcript.x, y, gpk)


# ------------------------------------------------------------ sign / verify

def _challenge(digest: bytes, T1: G1, T2: G1, T3: G1, R1: G1, R2: G1, R3: GT,
               R4: G1, R5: G1, ctx: OpCounters | None) -> int:
    data = (digest + encode_g1(T1) + encode_g1(T2) + encode_g1(T3) + encode_g1(R1)
            + encode_g1(R2) + encode_gt(R3) + encode_g1(R4) + encode_g1(R5))
    return hash_to_scalar(sha256(data, ctx))


def bbs_sign(gsk: GroupPrivateKey, gpk: GroupPublicKey, msg_digest: bytes,
             ctx: OpCounters | None = None, rng: random.Random | None = None,
             precompute_ctx: OpCounters | None = None) -> BbsSignature:
    """Sign a 32-byte digest on behalf of the group.

    Cost: 1 hash, 5 G1 multiplications, 2 double G1 multiplications, one
    4-term GT multi-exponentiation and no pairing. The per-key e(A, g2) and
    per-epoch constants are computed once and charged to ``precompute_ctx``.
    """
    if gsk.epoch != gpk.epoch:
        raise StaleKey(f"key epoch {gsk.epoch} != group epoch {gpk.epoch}")
    rng = rng or random.SystemRandom()
    k = gpk.constants(precompute_ctx)
    e_a_g2 = gsk.e_a_g2(gpk, precompute_ctx)
    p = ORDER
    alpha, beta = random_scalar(rng), random_scalar(rng)
    r_a, r_b, r_x, r_d1, r_d2, r_y = (random_scalar(rng) for _ in range(6))
    delta1, delta2 = gsk.x * alpha % p, gsk.x * beta % p

    T1 = g1_mul(gpk.u, alpha, ctx)
    T2 = g1_mul(gpk.v, beta, ctx)
    T3 = gsk.A + g1_mul(gpk.h, alpha + beta, ctx)
    R1 = g1_mul(gpk.u, r_a, ctx)
    R2 = g1_mul(gpk.v, r_b, ctx)
    R4 = multi_scalar_mul([T1, gpk.u], [r_x, -r_d1], ctx)
    R5 = multi_scalar_mul([T2, gpk.v], [r_x, -r_d2], ctx)
    # e(T3, g2) = e(A, g2) * e(h, g2)^(alpha+beta), so no pairing is needed
    R3 = multi_exp_gt(
        [e_a_g2, k.e_h_g2, k.e_h_w, k.e_h1_g2],
        [r_x, (alpha + beta) * r_x - r_d1 - r_d2, -r_a - r_b, -r_y],
        ctx,
    )
    c = _challenge(msg_digest, T1, T2, T3, R1, R2, R3, R4, R5, ctx)
    # h1 carries -y in the key relation, so the y response is r_y - c*y
    return BbsSignature(
        T1, T2, T3, c,
        s_alpha=(r_a + c * alpha) % p,
        s_beta=(r_b + c * beta) % p,
        s_x=(r_x + c * gsk.x) % p,
        s_delta1=(r_d1 + c * delta1) % p,
        s_delta2=(r_d2 + c * delta2) % p,
        s_y=(r_y - c * gsk.y) % p,
        epoch=gsk.epoch,
    )


def bbs_verify(gpk: GroupPublicKey, msg_digest: bytes, sig: BbsSignature,
               ctx: OpCounters | None = None,
               precompute_ctx: OpCounters | None = None) -> bool:
    """Check a group signature with exactly one pairing.

    Cost: 1 hash, 4 double G1 multiplications, one double G2 multiplication,
    one 4-term GT multi-exponentiation and 1 pairing.
    """
    if not isinstance(sig, BbsSignature) or sig.epoch != gpk.epoch:
        return False
    if not all(isinstance(t, G1) for t in (sig.T1, sig.T2, sig.T3)):
        return False
    k = gpk.constants(precompute_ctx)
    c = sig.c
    R1 = multi_scalar_mul([gpk.u, sig.T1], [sig.s_alpha, -c], ctx)
    R2 = multi_scalar_mul([gpk.v, sig.T2], [sig.s_beta, -c], ctx)
    R4 = multi_scalar_mul([sig.T1, gpk.u], [sig.s_x, -sig.s_delta1], ctx)
    R5 = multi_scalar_mul([sig.T2, gpk.v], [sig.s_x, -sig.s_delta2], ctx)
    # e(T3, g2)^s_x * e(T3, w)^c folded into one pairing
    paired = pairing(sig.T3, multi_scalar_mul_g2([gpk.g2, gpk.w], [sig.s_x, c], ctx), ctx)
    R3 = paired * multi_exp_gt(
        [k.e_h_w, k.e_h_g2, k.e_h1_g2, k.e_g1_g2],
        [-sig.s_alpha - sig.s_beta, -sig.s_delta1 - sig.s_delta2, -sig.s_y, -c],
        ctx,
    )
    return _challenge(msg_digest, sig.T1, sig.T2, sig.T3, R1, R2, R3, R4, R5, ctx) == c


def open_signature(tpsk: TpGroupSecret, gpk: GroupPublicKey, msg_digest: bytes,
                   sig: BbsSignature) -> G1:
    """Decrypt the signer's A = T3 / (T1^xi1 * T2^xi2) and check it is registered."""
    if not bbs_verify(gpk, msg_digest, sig):
        raise InvalidSignature("cannot open an invalid signature")
    A = sig.T3 - (sig.T1 * fr(tpsk.xi1) + sig.T2 * fr(tpsk.xi2))
    identify_member(tpsk, A)
    return A


def identify_member(tpsk: TpGroupSecret, A: G1) -> str:
    matches = [mid for mid, rec in tpsk.member_registry.items() if rec.A == A]
    if len(matches) != 1:
        raise UnknownSigner("opened A does not match exactly one registered member")
    return matches[0]


# ------------------------------------------------------------- revocation

def _check_entry_epoch(gpk: GroupPublicKey, entry: RevocationEntry) -> None:
    if entry.epoch != gpk.epoch:
        raise StaleList(f"entry for epoch {entry.epoch} cannot apply to epoch {gpk.epoch}")


def update_public(gpk: GroupPublicKey, rl_entry: RevocationEntry,
                  ctx: OpCounters | None = None) -> GroupPublicKey:
    """Advance the public key past one revocation, using public data only.

    ``w' = g2 * g2_hat^-x_r`` equals ``g2_hat^gamma``.
    """
    _check_entry_epoch(gpk, rl_entry)
    w_new = gpk.g2 - g2_mul(rl_entry.g2_hat, rl_entry.x_r, ctx)
    return replace(gpk, g1=rl_entry.g1_hat, h1=rl_entry.h1_hat, g2=rl_entry.g2_hat,
                   w=w_new, epoch=gpk.epoch + 1)


def update_member(gsk: GroupPrivateKey, gpk: GroupPublicKey, rl_entry: RevocationEntry,
                  ctx: OpCounters | None = None) -> tuple[GroupPrivateKey, GroupPublicKey]:
    """Move a member key and the public key past one revocation.

    ``A' = (A / C_hat)^(1/(x_r - x))`` with ``C_hat = g1_hat * h1_hat^-y``,
    evaluated as one 3-term multi-scalar multiplication. The revoked member has
    ``x = x_r`` and gets ``RevokedKey``.
    """
    if gsk.epoch != gpk.epoch:
        raise StaleKey(f"key epoch {gsk.epoch} != group epoch {gpk.epoch}")
    _check_entry_epoch(gpk, rl_entry)
    diff = (rl_entry.x_r - gsk.x) % ORDER
    if diff == 0:
        raise RevokedKey("this key is on the revocation list and cannot be updated")
    t = inverse(diff)
    A_new = multi_scalar_mul([gsk.A, rl_entry.g1_hat, rl_entry.h1_hat],
                             [t, -t, gsk.y * t], ctx)
    gpk_new = update_public(gpk, rl_entry, ctx)
    return GroupPrivateKey(A_new, gsk.x, gsk.y, gpk_new.epoch), gpk_new


def make_revocation_entry(tpsk: TpGroupSecret, gpk: GroupPublicKey, member_id: str,
                          ctx: OpCounters | None = None) -> RevocationEntry:
    rec = tpsk.member_registry.get(member_id)
    if rec is None:
        raise UnknownMember(f"no member {member_id!r}")
    if rec.revoked:
        raise AlreadyRevoked(f"member {member_id!r} is already revoked")
    inv = inverse(tpsk.gamma + rec.x)
    return RevocationEntry(
        x_r=rec.x,
        A_r=rec.A,
        g1_hat=g1_mul(gpk.g1, inv, ctx),
        h1_hat=g1_mul(gpk.h1, inv, ctx),
        g2_hat=g2_mul(gpk.g2, inv, ctx),
        epoch=gpk.epoch,
    )


def revoke(tpsk: TpGroupSecret, gpk: GroupPublicKey, member_id: str,
           tp_keys: SigningKeyPair, ts: int, ledger: Ledger,
           ctx: OpCounters | None = None) -> tuple[RevocationList, GroupPublicKey]:
    """Revoke a member, publish the extended RL at ``INDEX_RL``, and advance the gpk.

    The TP also moves every remaining registry entry to the new epoch
    (``A -> A^(1/(gamma + x_r))``) so that Open keeps working.
    """
    if ts <= tpsk.last_rl_ts:
        raise StaleTimestamp(f"ts {ts} does not advance past {tpsk.last_rl_ts}")
    entry = make_revocation_entry(tpsk, gpk, member_id, ctx)
    inv = inverse(tpsk.gamma + entry.x_r)
    for mid, rec in tpsk.member_registry.items():
        if mid == member_id:
            rec.revoked = True
        elif not rec.revoked:
            rec.A = g1_mul(rec.A, inv, ctx)
    tpsk.revocations.append(entry)
    rl = publish_revocation_list(tp_keys, tpsk.revocations, ts, ledger)
    tpsk.last_rl_ts = ts
    return rl, update_public(gpk, entry, ctx)


def publish_revocation_list(tp_keys: SigningKeyPair, entries: list[RevocationEntry],
                            ts: int, ledger: Ledger) -> RevocationList:
    unsigned = RevocationList(tuple(entries), int(ts))
    rl = RevocationList(unsigned.entries, unsigned.ts,
                        sign(tp_keys.sk, unsigned.signing_bytes()))
    ledger.store(INDEX_RL, LedgerRecord(RecordKind.REVOCATION_LIST, rl.to_payload()))
    return rl


def fetch_revocation_list(ledger: Ledger, pk_tp: bytes,
                          cached_ts: int | None = None) -> RevocationList:
    record = ledger.resolve(INDEX_RL)
    if record.kind is not RecordKind.REVOCATION_LIST:
        raise WrongKind("index_RL does not hold a revocation list")
    rl = RevocationList.from_payload(record.payload)
    if not rl.signed_by(pk_tp):
        raise BadSignature("revocation list signature does not verify under pk_TP")
    if cached_ts is not None and rl.ts < cached_ts:
        raise StaleList(f"list ts {rl.ts} is older than cached {cached_ts}")
    return rl


def published_revocations(ledger: Ledger) -> int:
    """Number of entries currently on the ledger RL (0 when none is published)."""
    try:
        record = ledger.resolve(INDEX_RL)
    except NotFound:
        return 0
    return len(decode_payload(RecordKind.REVOCATION_LIST, record.payload)["entries"])


def catch_up(gsk: GroupPrivateKey | None, gpk: GroupPublicKey, rl: RevocationList,
             ctx: OpCounters | None = None) -> tuple[GroupPrivateKey | None, GroupPublicKey]:
    """Apply every RL entry the keys have not seen yet, in order.

    With ``gsk=None`` only the public key is advanced (a pure verifier).
    """
    for entry in rl.entries[gpk.epoch:]:
        if gsk is None:
            gpk = update_public(gpk, entry, ctx)
        else:
            gsk, gpk = update_member(gsk, gpk, entry, ctx)
    return gsk, gpk
