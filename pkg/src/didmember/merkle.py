"""Merkle-tree membership.

Node side: a node keeps one 32-byte master secret ``S``. HKDF turns it into
``k`` seeds that serve directly as the ledger indexes of the node's DIDs; the
hashes of those indexes are the leaves of a perfect binary tree whose root is
registered with the trusted party (TP). Proving membership of a DID means
handing over its sibling path.

TP side: the TP signs and publishes the list of trusted roots at the
well-known index ``IDX_LIST``.
"""
from __future__ import annotations

import random
import struct
from dataclasses import dataclass, field

from .crypto.counters import OpCounters
from .crypto.hashing import DIGEST_SIZE, hkdf_seeds, sha256
from .crypto.signing import SigningKeyPair, sign, verify
from .errors import (
    BadSignature,
    DecodeError,
    InvalidParameter,
    NotFound,
    StaleList,
    StaleTimestamp,
    WrongKind,
)
from .identity import Did, create_did, resolve_did, revoke_did
from .ledger import IDX_LIST, Ledger, LedgerRecord, RecordKind, decode_payload, encode_payload

DEFAULT_K = 32
SEED_SALT = b"didmember/merkle/seed-salt"
_INFO_PREFIX = b"didmember/merkle/indexes"


def is_power_of_two(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


def _generation_info(generation: int) -> bytes:
    return _INFO_PREFIX + generation.to_bytes(8, "big")


@dataclass(frozen=True)
class MerkleTree:
    levels: tuple[tuple[bytes, ...], ...]

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    @property
    def leaves(self) -> tuple[bytes, ...]:
        return self.levels[0]

    @property
    def k(self) -> int:
        return len(self.levels[0])

    @property
    def depth(self) -> int:
        return len(self.levels) - 1


@dataclass(frozen=True)
class MembershipPath:
    leaf_position: int
    siblings: tuple[bytes, ...]
    directions: tuple[bool, ...]  # True: sibling sits on the right

    def siblings_bytes(self) -> bytes:
        return b"".join(self.siblings)

    def to_bytes(self) -> bytes:
        out = [struct.pack(">I", self.leaf_position)]
        for sib, right in zip(self.siblings, self.directions):
            out.append(b"\x01" if right else b"\x00")
            out.append(sib)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "MembershipPath":
        if len(data) < 4 or (len(data) - 4) % (1 + DIGEST_SIZE):
            raise DecodeError("membership path has a bad length")
        (pos,) = struct.unpack(">I", data[:4])
        sibs, dirs = [], []
        for off in range(4, len(data), 1 + DIGEST_SIZE):
            flag = data[off]
            if flag not in (0, 1):
                raise DecodeError("direction byte must be 0 or 1")
            dirs.append(flag == 1)
            sibs.append(bytes(data[off + 1:off + 1 + DIGEST_SIZE]))
        return cls(pos, tuple(sibs), tuple(dirs))


# ------------------------------------------------------------- tree building

def derive_indexes(master_secret: bytes, k: int, generation: int = 0,
                   ctx: OpCounters | None = None) -> list[bytes]:
    """HKDF seeds used verbatim as ledger indexes; costs ``2 + 2k`` hashes."""
    if not is_power_of_two(k):
        raise InvalidParameter(f"k must be a power of two, got {k}")
    return hkdf_seeds(master_secret, SEED_SALT, _generation_info(generation), k, ctx)


def build_tree(indexes: list[bytes], ctx: OpCounters | None = None) -> MerkleTree:
    """Hash the indexes into leaves and fold pairwise up to the root (2k - 1 hashes)."""
    if not indexes:
        raise InvalidParameter("cannot build a tree without leaves")
    if not is_power_of_two(len(indexes)):
        raise InvalidParameter(f"leaf count must be a power of two, got {len(indexes)}")
    level = tuple(sha256(idx, ctx) for idx in indexes)
    levels = [level]
    while len(level) > 1:
        level = tuple(sha256(level[i] + level[i + 1], ctx) for i in range(0, len(level), 2))
        levels.append(level)
    return MerkleTree(tuple(levels))


def gen_path(tree: MerkleTree, leaf_position: int) -> MembershipPath:
    if not 0 <= leaf_position < tree.k:
        raise InvalidParameter(f"leaf position {leaf_position} outside [0, {tree.k})")
    sibs, dirs = [], []
    pos = leaf_position
    for level in tree.levels[:-1]:
        sibs.append(level[pos ^ 1])
        dirs.append(pos % 2 == 0)
        pos //= 2
    return MembershipPath(leaf_position, tuple(sibs), tuple(dirs))


def recompute_root(idx: bytes, path: MembershipPath, ctx: OpCounters | None = None) -> bytes:
    node = sha256(idx, ctx)
    for sib, right in zip(path.siblings, path.directions):
        node = sha256(node + sib, ctx) if right else sha256(sib + node, ctx)
    return node


def path_well_formed(path: MembershipPath) -> bool:
    depth = len(path.siblings)
    return (
        depth == len(path.directions)
        and depth <= 32
        and all(len(s) == DIGEST_SIZE for s in path.siblings)
        and 0 <= path.leaf_position < (1 << depth)
        and all(right == (not (path.leaf_position >> i) & 1)
                for i, right in enumerate(path.directions))
    )


def verify_path(idx: bytes, path: MembershipPath, expected_root: bytes,
                ctx: OpCounters | None = None) -> bool:
    """True iff ``idx`` folds up to ``expected_root``; costs ``log2(k) + 1`` hashes."""
    if not path_well_formed(path):
        return False
    return recompute_root(idx, path, ctx) == expected_root


# ------------------------------------------------------------ node state

@dataclass
class NodeMerkleState:
    """Everything a node needs to regenerate its DIDs and proofs.

    Only ``master_secret``, ``k``, ``cursor`` and ``generation`` are state; the
    derived indexes and tree are an in-memory cache for the current generation.
    ``cursor`` is the position of the leaf whose DID is currently in use.
    """

    master_secret: bytes
    k: int = DEFAULT_K
    cursor: int = 0
    generation: int = 0
    _indexes: list[bytes] | None = field(default=None, repr=False, compare=False)
    _tree: MerkleTree | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.master_secret) != 32:
            raise InvalidParameter("master secret must be 32 bytes")
        if not is_power_of_two(self.k):
            raise InvalidParameter(f"k must be a power of two, got {self.k}")
        if not 0 <= self.cursor < self.k:
            raise InvalidParameter("cursor outside the tree")

    @classmethod
    def fresh(cls, rng: random.Random | None = None, k: int = DEFAULT_K) -> "NodeMerkleState":
        rng = rng or random.SystemRandom()
        return cls(rng.getrandbits(256).to_bytes(32, "big"), k)

    def regenerate(self, ctx: OpCounters | None = None) -> MerkleTree:
        """Rebuild indexes and tree for the current generation from ``S`` (4k + 1 hashes)."""
        self._indexes = derive_indexes(self.master_secret, self.k, self.generation, ctx)
        self._tree = build_tree(self._indexes, ctx)
        return self._tree

    def tree(self, ctx: OpCounters | None = None) -> MerkleTree:
        if self._tree is None:
            return self.regenerate(ctx)
        return self._tree

    def index_at(self, position: int, ctx: OpCounters | None = None) -> bytes:
        if self._indexes is None:
            self.regenerate(ctx)
        return self._indexes[position]

    def current_index(self, ctx: OpCounters | None = None) -> bytes:
        return self.index_at(self.cursor, ctx)

    def drop_cache(self) -> None:
        self._indexes = None
        self._tree = None


def provision(state: NodeMerkleState, keys: SigningKeyPair, ledger: Ledger,
              ctx: OpCounters | None = None, ts: int | None = None) -> tuple[Did, bytes]:
    """Build the node's tree and publish the DID of its current leaf.

    Returns the DID and the ROOT to hand to the TP.
    """
    tree = state.regenerate(ctx)
    did, _ = create_did(keys, state.current_index(), ledger, ts=ts)
    return did, tree.root


def rotate_leaf(state: NodeMerkleState, keys: SigningKeyPair, ledger: Ledger,
                ctx: OpCounters | None = None,
                ts: int | None = None) -> tuple[Did, MembershipPath, bytes | None]:
    """Move to the next DID of the tree, revoking the current one.

    When the current leaf is the last one, the node starts a new generation:
    fresh indexes and tree are derived from ``S`` and the new ROOT is returned
    so it can be submitted to the TP. Otherwise the ROOT is unchanged and
    ``None`` is returned in its place.
    """
    old_did = Did(state.current_index(ctx))
    new_root = None
    if state.cursor == state.k - 1:
        state.generation += 1
        state.cursor = 0
        new_root = state.regenerate(ctx).root
    else:
        state.cursor += 1
    _retire(old_did, ledger, ts)
    did, _ = create_did(keys, state.current_index(ctx), ledger, ts=ts)
    return did, gen_path(state.tree(ctx), state.cursor), new_root


def rotate_tree(state: NodeMerkleState, keys: SigningKeyPair, ledger: Ledger,
                ctx: OpCounters | None = None, ts: int | None = None) -> tuple[Did, bytes]:
    """Abandon the remaining leaves and start a new generation at leaf 0.

    Returns the new DID and the new ROOT for the TP.
    """
    old_did = Did(state.current_index(ctx))
    state.generation += 1
    state.cursor = 0
    root = state.regenerate(ctx).root
    _retire(old_did, ledger, ts)
    did, _ = create_did(keys, state.current_index(ctx), ledger, ts=ts)
    return did, root


def _retire(did: Did, ledger: Ledger, ts: int | None) -> None:
    try:
        if not resolve_did(did, ledger).revoked:
            revoke_did(did, ledger, ts=ts)
    except NotFound:
        pass


# ------------------------------------------------------ trusted roots list

@dataclass(frozen=True)
class TrustedRootsList:
    roots: tuple[bytes, ...]
    ts: int
    signature: bytes = b""

    def signing_bytes(self) -> bytes:
        return b"".join(self.roots) + self.ts.to_bytes(8, "big")

    def signed_by(self, pk_tp: bytes) -> bool:
        try:
            return verify(pk_tp, self.signing_bytes(), self.signature)
        except DecodeError:
            return False

    def to_payload(self) -> bytes:
        return encode_payload({
            "roots": [r.hex() for r in self.roots],
            "ts": self.ts,
            "signature": self.signature.hex(),
        })

    @classmethod
    def from_payload(cls, payload: bytes) -> "TrustedRootsList":
        obj = decode_payload(RecordKind.TRUSTED_ROOTS_LIST, payload)
        try:
            roots = tuple(bytes.fromhex(r) for r in obj["roots"])
            signature = bytes.fromhex(obj["signature"])
        except (TypeError, ValueError) as exc:
            raise DecodeError("trusted roots list has non-hex fields") from exc
        if any(len(r) != DIGEST_SIZE for r in roots):
            raise DecodeError("roots must be 32-byte digests")
        return cls(roots, int(obj["ts"]), signature)


def _published_list(ledger: Ledger) -> TrustedRootsList | None:
    try:
        record = ledger.resolve(IDX_LIST)
    except NotFound:
        return None
    return TrustedRootsList.from_payload(record.payload)


def tp_publish_roots(tp_keys: SigningKeyPair, roots: list[bytes], ts: int,
                     ledger: Ledger) -> int:
    roots = list(dict.fromkeys(roots))
    previous = _published_list(ledger)
    if previous is not None and ts <= previous.ts:
        raise StaleTimestamp(f"ts {ts} does not advance past {previous.ts}")
    unsigned = TrustedRootsList(tuple(roots), int(ts))
    signed = TrustedRootsList(unsigned.roots, unsigned.ts,
                              sign(tp_keys.sk, unsigned.signing_bytes()))
    return ledger.store(IDX_LIST, LedgerRecord(RecordKind.TRUSTED_ROOTS_LIST,
                                               signed.to_payload()))


def fetch_trusted_roots(ledger: Ledger, pk_tp: bytes,
                        cached_ts: int | None = None) -> TrustedRootsList:
    record = ledger.resolve(IDX_LIST)
    if record.kind is not RecordKind.TRUSTED_ROOTS_LIST:
        raise WrongKind("idx_list does not hold a trusted roots list")
    roots = TrustedRootsList.from_payload(record.payload)
    if not roots.signed_by(pk_tp):
        raise BadSignature("trusted roots list signature does not verify under pk_TP")
    if cached_ts is not None and roots.ts < cached_ts:
        raise StaleList(f"list ts {roots.ts} is older than cached {cached_ts}")
    return roots


@dataclass
class MerkleTrustedParty:
    """TP bookkeeping: collected ROOTs, own tree, and list publication."""

    keys: SigningKeyPair
    state: NodeMerkleState
    roots: dict[str, bytes] = field(default_factory=dict)
    last_ts: int = -1

    @classmethod
    def create(cls, rng: random.Random | None = None, k: int = DEFAULT_K,
               ctx: OpCounters | None = None) -> "MerkleTrustedParty":
        tp = cls(SigningKeyPair.generate(rng), NodeMerkleState.fresh(rng, k))
        tp.state.regenerate(ctx)
        return tp

    @property
    def pk(self) -> bytes:
        return self.keys.pk

    def register(self, node_id: str, root: bytes) -> None:
        self.roots[node_id] = root

    def remove(self, node_id: str) -> None:
        self.roots.pop(node_id, None)

    def current_roots(self) -> list[bytes]:
        return list(self.roots.values()) + [self.state.tree().root]

    def publish(self, ledger: Ledger, ts: int) -> int:
        version = tp_publish_roots(self.keys, self.current_roots(), ts, ledger)
        self.last_ts = ts
        return version

    def rotate_keys(self, new_keys: SigningKeyPair, ledger: Ledger, ts: int) -> int:
        self.keys = new_keys
        return self.publish(ledger, ts)

