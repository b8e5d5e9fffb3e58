"""Circuit intermediate representation and pure gate-level edits.

A circuit is an ordered list of unitary gate applications over one quantum
register, plus a qubit -> classical-bit measurement map. Measurements and
barriers never appear in the gate list, so gate positions index exactly the
repairable gates. All values are immutable; edits return fresh circuits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import GateIndexError, QubitIndexError


class GateKind(Enum):
    """Supported gate catalog. Value = (qasm name, qubit count, param count)."""

    ID = ("id", 1, 0)
    X = ("x", 1, 0)
    Y = ("y", 1, 0)
    Z = ("z", 1, 0)
    H = ("h", 1, 0)
    S = ("s", 1, 0)
    SDG = ("sdg", 1, 0)
    T = ("t", 1, 0)
    TDG = ("tdg", 1, 0)
    RX = ("rx", 1, 1)
    RY = ("ry", 1, 1)
    RZ = ("rz", 1, 1)
    P = ("p", 1, 1)
    U = ("u", 1, 3)
    CX = ("cx", 2, 0)
    CZ = ("cz", 2, 0)
    CP = ("cp", 2, 1)
    CRZ = ("crz", 2, 1)
    SWAP = ("swap", 2, 0)
    CCX = ("ccx", 3, 0)
    MEASURE = ("measure", 1, 0)
    BARRIER = ("barrier", 0, 0)

    @property
    def gate_name(self) -> str:
        return self.value[0]

    @property
    def num_qubits(self) -> int:
        return self.value[1]

    @property
    def param_count(self) -> int:
        return self.value[2]

    @property
    def is_unitary(self) -> bool:
        return self not in (GateKind.MEASURE, GateKind.BARRIER)


GATE_BY_NAME: dict[str, GateKind] = {k.gate_name: k for k in GateKind}


@dataclass(frozen=True)
class GateApp:
    """One gate applied at a fixed position in circuit order."""

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    position: int = 0

    def __post_init__(self):
        if not self.kind.is_unitary:
            raise ValueError(f"{self.kind.gate_name} cannot appear in the gate list")
        if len(self.qubits) != self.kind.num_qubits:
            raise QubitIndexError(
                f"{self.kind.gate_name} expects {self.kind.num_qubits} qubits, got {len(self.qubits)}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise QubitIndexError(f"{self.kind.gate_name} qubits must be distinct: {self.qubits}")
        if len(self.params) != self.kind.param_count:
            raise ValueError(
                f"{self.kind.gate_name} expects {self.kind.param_count} params, got {len(self.params)}"
            )
        for p in self.params:
            if not math.isfinite(p):
                raise ValueError(f"non-finite angle {p} on {self.kind.gate_name}")

    def same_gate(self, other: "GateApp", atol: float = 1e-9) -> bool:
        """Structural equality ignoring position."""
        return (
            self.kind is other.kind
            and self.qubits == other.qubits
            and len(self.params) == len(other.params)
            and all(abs(a - b) <= atol for a, b in zip(self.params, other.params))
        )


@dataclass(frozen=True)
class Circuit:
    """Gate list over ``num_qubits`` qubits plus a measurement map.

    ``gates[i].position == i`` always holds; edits renumber.
    """

    num_qubits: int
    num_clbits: int = 0
    gates: tuple[GateApp, ...] = ()
    measurements: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        if self.num_clbits < 0:
            raise ValueError("negative classical register size")
        for i, g in enumerate(self.gates):
            if g.position != i:
                raise ValueError(f"gate positions must be contiguous; expected {i}, got {g.position}")
            for q in g.qubits:
                if not 0 <= q < self.num_qubits:
                    raise QubitIndexError(
                        f"qubit {q} out of range for {self.num_qubits}-qubit circuit"
                    )
        for q, c in self.measurements.items():
            if not 0 <= q < self.num_qubits:
                raise QubitIndexError(f"measured qubit {q} does not exist")
            if not 0 <= c < self.num_clbits:
                raise ValueError(f"classical bit {c} out of range")

    def __len__(self) -> int:
        return len(self.gates)

    def gate_names(self) -> list[str]:
        return [g.kind.gate_name for g in self.gates]


def _renumber(gates: list[GateApp]) -> tuple[GateApp, ...]:
    return tuple(replace(g, position=i) for i, g in enumerate(gates))


def remove_gate(c: Circuit, pos: int) -> Circuit:
    """Copy of ``c`` without the gate at ``pos``; later positions shift down."""
    if not 0 <= pos < len(c.gates):
        raise GateIndexError(f"position {pos} out of range for {len(c.gates)} gates")
    kept = [g for i, g in enumerate(c.gates) if i != pos]
    return replace(c, gates=_renumber(kept))


def insert_gate(c: Circuit, pos: int, g: GateApp) -> Circuit:
    """Copy of ``c`` with ``g`` inserted before position ``pos`` (append at len)."""
    if not 0 <= pos <= len(c.gates):
        raise GateIndexError(f"insert position {pos} out of range for {len(c.gates)} gates")
    for q in g.qubits:
        if not 0 <= q < c.num_qubits:
            raise QubitIndexError(f"qubit {q} out of range for {c.num_qubits}-qubit circuit")
    new = list(c.gates)
    new.insert(pos, g)
    return replace(c, gates=_renumber(new))


def replace_gate(c: Circuit, pos: int, g: GateApp) -> Circuit:
    """Copy of ``c`` with the gate at ``pos`` swapped for ``g``."""
    if not 0 <= pos < len(c.gates):
        raise GateIndexError(f"position {pos} out of range for {len(c.gates)} gates")
    for q in g.qubits:
        if not 0 <= q < c.num_qubits:
            raise QubitIndexError(f"qubit {q} out of range for {c.num_qubits}-qubit circuit")
    new = list(c.gates)
    new[pos] = g
    return replace(c, gates=_renumber(new))


def build_circuit(
    num_qubits: int,
    ops: list[tuple] | None = None,
    measure_all: bool = True,
) -> Circuit:
    """Convenience constructor: ops as (name, qubits, [params]) tuples."""
    gates = []
    for i, op in enumerate(ops or []):
        name, qubits = op[0], op[1]
        params = tuple(op[2]) if len(op) > 2 else ()
        if isinstance(qubits, int):
            qubits = (qubits,)
        gates.append(GateApp(GATE_BY_NAME[name], tuple(qubits), params, position=i))
    meas = {q: q for q in range(num_qubits)} if measure_all else {}
    return Circuit(
        num_qubits=num_qubits,
        num_clbits=num_qubits if measure_all else 0,
        gates=tuple(gates),
        measurements=meas,
    )
