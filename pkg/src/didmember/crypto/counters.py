"""Per-context operation counters.

Every primitive in :mod:`didmember.crypto` takes an ``OpCounters`` and bumps the
matching category, so phase-level costs can be read off a context after the
fact. There is no global counter; concurrent sessions each own one.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any


@dataclass
class OpCounters:
    hash_count: int = 0
    g1_mul_count: int = 0
    g2_mul_count: int = 0
    gt_exp_count: int = 0
    pairing_count: int = 0
    multi_mul_profile: Counter = field(default_factory=Counter)
    multi_exp_profile: Counter = field(default_factory=Counter)
    multi_mul_g2_profile: Counter = field(default_factory=Counter)

    _SCALARS = ("hash_count", "g1_mul_count", "g2_mul_count", "gt_exp_count", "pairing_count")
    _PROFILES = ("multi_mul_profile", "multi_exp_profile", "multi_mul_g2_profile")

    def snapshot(self) -> "OpCounters":
        return OpCounters.from_dict(self.as_dict())

    def delta(self, earlier: "OpCounters") -> "OpCounters":
        """Counts accumulated since ``earlier`` was snapshotted."""
        out = OpCounters()
        for name in self._SCALARS:
            setattr(out, name, getattr(self, name) - getattr(earlier, name))
        for name in self._PROFILES:
            diff = Counter(getattr(self, name))
            diff.subtract(getattr(earlier, name))
            setattr(out, name, Counter({k: v for k, v in diff.items() if v}))
        return out

    def merge(self, other: "OpCounters") -> None:
        for name in self._SCALARS:
            setattr(self, name, getattr(self, name) + getattr(other, name))
        for name in self._PROFILES:
            getattr(self, name).update(getattr(other, name))

    def is_zero(self) -> bool:
        return not any(getattr(self, n) for n in self._SCALARS) and not any(
            sum(getattr(self, n).values()) for n in self._PROFILES
        )

    def as_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {n: getattr(self, n) for n in self._SCALARS}
        for n in self._PROFILES:
            d[n] = {str(k): v for k, v in sorted(getattr(self, n).items()) if v}
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "OpCounters":
        out = cls(**{n: int(d.get(n, 0)) for n in cls._SCALARS})
        for n in cls._PROFILES:
            setattr(out, n, Counter({int(k): int(v) for k, v in d.get(n, {}).items()}))
        return out
