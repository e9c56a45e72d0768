"""Proof-of-membership authentication for DID-identified IoT nodes.

Two interchangeable membership schemes sit on a mock ledger: a Merkle tree of
HKDF-derived DIDs anchored by a TP-signed list of roots, and a BBS group
signature adapted for strong exculpability.
"""
from .auth import AuthOutcome, AuthResponse, Nonce, Reason, Scheme, mutual_authenticate
from .crypto import OpCounters, SigningKeyPair
from .identity import Did, DidDocument, create_did, resolve_did, revoke_did, update_did
from .ledger import Ledger

__all__ = [
    "AuthOutcome", "AuthResponse", "Did", "DidDocument", "Ledger", "Nonce", "OpCounters",
    "Reason", "Scheme", "SigningKeyPair", "create_did", "mutual_authenticate",
    "resolve_did", "revoke_did", "update_did",
]
