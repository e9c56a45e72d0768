"""Mock distributed ledger.

A local keyed store standing in for the DLT root of trust. Every index keeps
its full version history; an overwrite appends a new version and never
destroys the previous one. The whole store persists to one JSON document with
payloads embedded as lowercase hex.
"""
from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import DecodeError, KindConflict, NotFound, WrongKind

INDEX_SIZE = 32
# well-known indexes: trusted-roots list and revocation list
IDX_LIST = bytes(31) + b"\x01"
INDEX_RL = bytes(31) + b"\x02"

FILE_FORMAT = "didmember-ledger/1"


class RecordKind(str, Enum):
    DID_DOCUMENT = "DidDocument"
    TRUSTED_ROOTS_LIST = "TrustedRootsList"
    REVOCATION_LIST = "RevocationList"


_REQUIRED_KEYS = {
    RecordKind.DID_DOCUMENT: {"id", "pk_id", "created_ts", "updated_ts", "revoked"},
    RecordKind.TRUSTED_ROOTS_LIST: {"roots", "ts", "signature"},
    RecordKind.REVOCATION_LIST: {"entries", "ts", "signature"},
}


def check_index(index: bytes) -> bytes:
    if not isinstance(index, (bytes, bytearray)) or len(index) != INDEX_SIZE:
        raise DecodeError("ledger index must be exactly 32 bytes")
    return bytes(index)


def decode_payload(kind: RecordKind, payload: bytes) -> dict:
    """Parse a record payload and check it has the fields its kind requires."""
    try:
        obj = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DecodeError(f"{kind.value} payload is not canonical JSON") from exc
    if not isinstance(obj, dict) or not _REQUIRED_KEYS[kind] <= obj.keys():
        raise DecodeError(f"{kind.value} payload is missing fields")
    return obj


def encode_payload(obj: dict) -> bytes:
    return json.dumps(obj, separators=(",", ":")).encode("utf-8")


@dataclass(frozen=True)
class LedgerRecord:
    kind: RecordKind
    payload: bytes
    version: int = 0

    def decoded(self) -> dict:
        return decode_payload(self.kind, self.payload)


class Ledger:
    """Append-only keyed store with a single-writer lock.

    Readers never see a partially written version: a version list is only
    extended after the record has been fully built.
    """

    def __init__(self) -> None:
        self._history: dict[bytes, list[LedgerRecord]] = {}
        self._lock = threading.Lock()

    def __contains__(self, index: bytes) -> bool:
        return bytes(index) in self._history

    def __len__(self) -> int:
        return len(self._history)

    def store(self, index: bytes, record: LedgerRecord) -> int:
        index = check_index(index)
        kind = RecordKind(record.kind)
        decode_payload(kind, record.payload)
        with self._lock:
            versions = self._history.get(index)
            if versions and versions[-1].kind is not kind:
                raise KindConflict(
                    f"index {index.hex()} holds {versions[-1].kind.value}, not {kind.value}")
            version = len(versions) + 1 if versions else 1
            stored = LedgerRecord(kind, bytes(record.payload), version)
            self._history[index] = (versions or []) + [stored]
        return version

    def resolve(self, index: bytes) -> LedgerRecord:
        versions = self._history.get(check_index(index))
        if not versions:
            raise NotFound(f"nothing stored at {bytes(index).hex()}")
        return versions[-1]

    def resolve_version(self, index: bytes, version: int) -> LedgerRecord:
        versions = self._history.get(check_index(index))
        if not versions or not 1 <= version <= len(versions):
            raise NotFound(f"no version {version} at {bytes(index).hex()}")
        return versions[version - 1]

    def history(self, index: bytes) -> list[LedgerRecord]:
        return list(self._history.get(check_index(index), []))

    def latest_version(self, index: bytes) -> int:
        return len(self._history.get(check_index(index), []))

    def mark_revoked(self, index: bytes, ts: int | None = None) -> bool:
        """Append a revoked copy of the DID Document at ``index``.

        Idempotent: revoking an already revoked document writes nothing.
        """
        record = self.resolve(index)
        if record.kind is not RecordKind.DID_DOCUMENT:
            raise WrongKind(f"index {bytes(index).hex()} holds {record.kind.value}")
        doc = record.decoded()
        if doc["revoked"]:
            return True
        doc["revoked"] = True
        if ts is not None:
            doc["updated_ts"] = max(int(ts), doc["created_ts"])
        self.store(index, LedgerRecord(RecordKind.DID_DOCUMENT, encode_payload(doc)))
        return True

    # ------------------------------------------------------------ persistence

    def to_json(self) -> str:
        body = {
            "format": FILE_FORMAT,
            "records": {
                index.hex(): [
                    {"version": r.version, "kind": r.kind.value, "payload": r.payload.hex()}
                    for r in versions
                ]
                for index, versions in self._history.items()
            },
        }
        return json.dumps(body, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Ledger":
        body = json.loads(text)
        if body.get("format") != FILE_FORMAT:
            raise DecodeError("unrecognised ledger file format")
        ledger = cls()
        for index_hex, versions in body["records"].items():
            index = check_index(bytes.fromhex(index_hex))
            records = []
            for expected, item in enumerate(versions, start=1):
                if item["version"] != expected:
                    raise DecodeError(f"version gap at {index_hex}")
                kind = RecordKind(item["kind"])
                payload = bytes.fromhex(item["payload"])
                decode_payload(kind, payload)
                records.append(LedgerRecord(kind, payload, expected))
            ledger._history[index] = records
        return ledger

    def save(self, path: str | os.PathLike) -> None:
        tmp = Path(f"{path}.tmp")
        tmp.write_text(self.to_json())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Ledger":
        return cls.from_json(Path(path).read_text())
