"""Analytic cost model: symbolic per-phase formulas and their evaluation.

A multi-scalar term ``l*x`` (l simultaneous multiplications or exponentiations)
costs ``f(l) * time(x)`` with ``f(l) = (2^(l+1) - 1) / (3 * 2^(l-1))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple

from ..auth import Scheme
from ..crypto.counters import OpCounters
from ..errors import InvalidParameter

PRIMITIVES = ("h", "m", "e", "P")


def accel_factor(ell: int) -> float:
    if ell < 1:
        raise InvalidParameter(f"multi-scalar width must be >= 1, got {ell}")
    return (2 ** (ell + 1) - 1) / (3 * 2 ** (ell - 1))


class Phase(str, Enum):
    PROVISIONING = "Provisioning"
    PROOF = "Operation (Proof)"
    VERIFY = "Operation (Verify)"
    ROTATION = "Secret Rotation"
    NETWORK_UPDATE = "Network Update"
    # one-off pairing constants; the tables leave these out
    PRECOMPUTATION = "Precomputation"


TABLE_PHASES = (Phase.PROVISIONING, Phase.PROOF, Phase.VERIFY, Phase.ROTATION,
                Phase.NETWORK_UPDATE)


@dataclass
class CostModel:
    """Primitive times in milliseconds.

    ``m2`` (a G2 scalar multiplication) is optional; when absent it is costed
    as ``m``.
    """

    primitive_times: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        missing = [p for p in PRIMITIVES if p not in self.primitive_times]
        if missing:
            raise InvalidParameter(f"cost model lacks primitive times for {missing}")
        self.primitive_times = {k: float(v) for k, v in self.primitive_times.items()}

    def __getitem__(self, prim: str) -> float:
        if prim == "m2":
            return self.primitive_times.get("m2", self.primitive_times["m"])
        return self.primitive_times[prim]

    @staticmethod
    def accel_factor(ell: int) -> float:
        return accel_factor(ell)

    def term_time(self, prim: str, ell: int = 1) -> float:
        return accel_factor(ell) * self[prim]

    def time_of(self, counts: OpCounters) -> float:
        """Estimated milliseconds for an observed counter snapshot."""
        total = (counts.hash_count * self["h"] + counts.g1_mul_count * self["m"]
                 + counts.g2_mul_count * self["m2"] + counts.gt_exp_count * self["e"]
                 + counts.pairing_count * self["P"])
        for profile, prim in ((counts.multi_mul_profile, "m"),
                              (counts.multi_exp_profile, "e"),
                              (counts.multi_mul_g2_profile, "m2")):
            total += sum(n * self.term_time(prim, ell) for ell, n in profile.items())
        return total


TABLE_I = CostModel({"h": 0.004, "m": 4.6, "e": 33.6, "P": 50.4})

TABLE_I_ROWS = (
    ("Hash computation (sha256)", "h"),
    ("Scalar multiplication in G1", "m"),
    ("Exponentiation in GT", "e"),
    ("Ate pairing", "P"),
)


class Term(NamedTuple):
    """``count`` occurrences of an ``ell``-wide operation on primitive ``prim``."""

    count: int
    prim: str
    ell: int = 1

    def render(self) -> str:
        op = self.prim if self.ell == 1 else f"{self.ell}*{self.prim}"
        if self.count == 1:
            return op
        return f"{self.count}({op})" if self.ell > 1 else f"{self.count}{op}"


@dataclass(frozen=True)
class Formula:
    terms: tuple[Term, ...]
    optional: bool = False
    text: str = ""

    def time(self, model: CostModel) -> float:
        return sum((t.count * model.term_time(t.prim, t.ell) for t in self.terms), 0.0)

    def render(self) -> str:
        body = self.text or (" + ".join(t.render() for t in self.terms) or "none")
        return f"none or {body}" if self.optional else body


def _log2(k: int) -> int:
    if k < 1 or k & (k - 1):
        raise InvalidParameter(f"k must be a power of two, got {k}")
    return int(math.log2(k))


def formula(scheme: Scheme | str, phase: Phase | str, k: int = 32) -> Formula:
    """Symbolic cost of one phase on the node, as tabulated."""
    scheme, phase = Scheme(scheme), Phase(phase)
    if scheme is Scheme.MERKLE:
        full = Formula((Term(4 * k + 1, "h"),), text="h(4k+1)")
        table = {
            Phase.PROVISIONING: full,
            Phase.PROOF: full,
            Phase.VERIFY: Formula((Term(_log2(k) + 1, "h"),), text="h(log2(k)+1)"),
            Phase.ROTATION: Formula(full.terms, optional=True, text="h(4k+1)"),
            Phase.NETWORK_UPDATE: Formula(()),
        }
    else:
        table = {
            Phase.PROVISIONING: Formula((Term(2, "m"),)),
            Phase.PROOF: Formula((Term(1, "h"), Term(5, "m"), Term(2, "m", 2), Term(1, "e", 3))),
            Phase.VERIFY: Formula((Term(1, "h"), Term(4, "m", 2), Term(1, "e", 4), Term(1, "P"))),
            Phase.ROTATION: Formula((Term(2, "m"),), optional=True),
            Phase.NETWORK_UPDATE: Formula((Term(1, "m", 2),), optional=True),
        }
    if phase not in table:
        raise InvalidParameter(f"no tabulated cost for phase {phase.value}")
    return table[phase]


def estimate_time(scheme: Scheme | str, phase: Phase | str, k: int, model: CostModel,
                  worst_case: bool = True) -> float:
    """Closed-form phase time in ms; optional ("none or X") phases cost 0 in the best case."""
    try:
        f = formula(scheme, phase, k)
    except ValueError as exc:
        raise InvalidParameter(str(exc)) from exc
    if f.optional and not worst_case:
        return 0.0
    return f.time(model)


def estimate_from_counts(counts: OpCounters, model: CostModel) -> float:
    return model.time_of(counts)


# ------------------------------------------------------------------ tables

def _render(title: str, header: Iterable[str], rows: list[tuple[str, ...]]) -> str:
    header = tuple(header)
    widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
    line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"

    def fmt(r: tuple[str, ...]) -> str:
        return "| " + " | ".join(c.ljust(w) for c, w in zip(r, widths)) + " |"

    return "\n".join([title, line, fmt(header), line, *map(fmt, rows), line])


def _ms(x: float) -> str:
    if 0 < x < 0.001:
        return f"{x:.2e}"
    return f"{x:.3f}" if x < 1 else f"{x:.1f}"


def table_rows(scheme: Scheme | str, model: CostModel, k: int) -> list[tuple[str, str, float]]:
    """(phase label, formula, ms) rows; optional phases split into best and worst."""
    rows = []
    for phase in TABLE_PHASES:
        f = formula(scheme, phase, k)
        if f.optional:
            rows.append((f"{phase.value} (best)", "none", 0.0))
            rows.append((f"{phase.value} (worst)", f.render().removeprefix("none or "),
                         f.time(model)))
        else:
            rows.append((phase.value, f.render(), f.time(model)))
    return rows


def emit_table(number: int, model: CostModel, k: int = 32) -> str:
    if number == 1:
        rows = [(name, sym, _ms(model[sym])) for name, sym in TABLE_I_ROWS]
        return _render("Primitive times", ("Cryptographic algorithm", "Notation", "Time (ms)"),
                       rows)
    if number not in (2, 3):
        raise InvalidParameter(f"no table {number}")
    scheme = Scheme.MERKLE if number == 2 else Scheme.BBS
    title = (f"Estimated performance, Merkle tree (k={k})" if scheme is Scheme.MERKLE
             else "Estimated performance, BBS group signature")
    rows = [(p, f, _ms(t)) for p, f, t in table_rows(scheme, model, k)]
    return _render(title, ("Operational phase", "Estimated computations", "Time (ms)"), rows)


def emit_tables(model: CostModel, k: int = 32) -> str:
    return "\n\n".join(emit_table(n, model, k) for n in (1, 2, 3))
