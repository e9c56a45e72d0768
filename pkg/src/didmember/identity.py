"""DID Method primitives over the mock ledger: create, resolve, update, revoke."""
from __future__ import annotations

import re
import time
from dataclasses import dataclass

from .crypto.signing import SigningKeyPair
from .errors import (
    AlreadyRevoked,
    DecodeError,
    IndexCollision,
    NotFound,
    WrongKind,
)
from .ledger import (
    Ledger,
    LedgerRecord,
    RecordKind,
    check_index,
    decode_payload,
    encode_payload,
)

METHOD_NAME = "mock"
_DID_RE = re.compile(r"^did:mock:([0-9a-f]{64})$")


@dataclass(frozen=True)
class Did:
    index: bytes

    def __post_init__(self) -> None:
        check_index(self.index)

    method_name = METHOD_NAME

    def __str__(self) -> str:
        return f"did:{METHOD_NAME}:{self.index.hex()}"

    @classmethod
    def parse(cls, text: str) -> "Did":
        m = _DID_RE.match(text)
        if m is None:
            raise DecodeError(f"not a did:mock identifier: {text!r}")
        return cls(bytes.fromhex(m.group(1)))


@dataclass(frozen=True)
class DidDocument:
    id: Did
    pk_id: bytes
    created_ts: int
    updated_ts: int
    revoked: bool = False

    def to_payload(self) -> bytes:
        # field order is part of the canonical form
        return encode_payload({
            "id": str(self.id),
            "pk_id": self.pk_id.hex(),
            "created_ts": self.created_ts,
            "updated_ts": self.updated_ts,
            "revoked": self.revoked,
        })

    @classmethod
    def from_payload(cls, payload: bytes) -> "DidDocument":
        obj = decode_payload(RecordKind.DID_DOCUMENT, payload)
        return cls(
            id=Did.parse(obj["id"]),
            pk_id=bytes.fromhex(obj["pk_id"]),
            created_ts=int(obj["created_ts"]),
            updated_ts=int(obj["updated_ts"]),
            revoked=bool(obj["revoked"]),
        )


def _now(ts: int | None) -> int:
    return int(time.time()) if ts is None else int(ts)


def create_did(keys: SigningKeyPair, index: bytes, ledger: Ledger,
               ts: int | None = None) -> tuple[Did, DidDocument]:
    did = Did(check_index(index))
    if index in ledger:
        raise IndexCollision(f"{did} is already taken")
    now = _now(ts)
    doc = DidDocument(did, keys.pk, now, now)
    ledger.store(index, LedgerRecord(RecordKind.DID_DOCUMENT, doc.to_payload()))
    return did, doc


def resolve_did(did: Did, ledger: Ledger) -> DidDocument:
    record = ledger.resolve(did.index)
    if record.kind is not RecordKind.DID_DOCUMENT:
        raise WrongKind(f"{did} does not point to a DID Document")
    doc = DidDocument.from_payload(record.payload)
    if doc.id != did:
        raise DecodeError(f"document at {did} claims id {doc.id}")
    return doc


def update_did(did: Did, new_keys: SigningKeyPair, ledger: Ledger,
               new_index: bytes | None = None,
               ts: int | None = None) -> tuple[Did, DidDocument]:
    """Rotate the identity key of ``did``.

    Without ``new_index`` a new document version is written at the same index,
    so the DID is unchanged. With ``new_index`` the old DID is revoked and a new
    document is created there.
    """
    doc = resolve_did(did, ledger)
    if doc.revoked:
        raise AlreadyRevoked(f"{did} is revoked")
    now = max(_now(ts), doc.created_ts)
    if new_index is None:
        updated = DidDocument(did, new_keys.pk, doc.created_ts, now)
        ledger.store(did.index, LedgerRecord(RecordKind.DID_DOCUMENT, updated.to_payload()))
        return did, updated
    if new_index in ledger:
        raise IndexCollision(f"{Did(new_index)} is already taken")
    revoke_did(did, ledger, ts=now)
    return create_did(new_keys, new_index, ledger, ts=now)


def revoke_did(did: Did, ledger: Ledger, ts: int | None = None) -> bool:
    if did.index not in ledger:
        raise NotFound(f"{did} does not resolve")
    return ledger.mark_revoked(did.index, ts=ts)
