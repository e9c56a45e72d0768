"""Exception hierarchy shared by every module."""


class DidMemberError(Exception):
    """Base class for all package errors."""


class InvalidParameter(DidMemberError, ValueError):
    pass


class DecodeError(DidMemberError, ValueError):
    """Malformed key, signature or wire encoding."""


class InvalidPoint(DecodeError):
    """Byte string is not a valid element of the expected prime-order subgroup."""


# ledger / identity
class NotFound(DidMemberError, LookupError):
    pass


class KindConflict(DidMemberError):
    pass


class WrongKind(DidMemberError):
    pass


class IndexCollision(DidMemberError):
    pass


class AlreadyRevoked(DidMemberError):
    pass


# trust anchors
class StaleTimestamp(DidMemberError):
    """Publisher tried to publish a list whose timestamp does not advance."""


class StaleList(DidMemberError):
    """Consumer was handed a list older than one it has already seen."""


class BadSignature(DidMemberError):
    pass


# merkle
class StateMismatch(DidMemberError):
    pass


# bbs
class ProtocolOrder(DidMemberError):
    pass


class StaleKey(DidMemberError):
    pass


class RevokedKey(DidMemberError):
    pass


class UnknownMember(DidMemberError, LookupError):
    pass


class InvalidSignature(DidMemberError):
    pass


class UnknownSigner(DidMemberError, LookupError):
    pass


# auth / sim
class TransportError(DidMemberError):
    """Message could not be delivered or decoded; distinct from a rejected proof."""


class ScriptError(DidMemberError):
    def __init__(self, message: str, event_index: int | None = None):
        self.event_index = event_index
        if event_index is not None:
            message = f"event {event_index}: {message}"
        super().__init__(message)
