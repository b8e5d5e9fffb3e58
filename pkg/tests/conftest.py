import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qrep.circuit import GATE_BY_NAME, Circuit, GateApp, build_circuit

# kinds eligible for random circuits in property tests
RANDOM_KINDS = [
    "id", "x", "y", "z", "h", "s", "sdg", "t", "tdg",
    "rx", "ry", "rz", "p", "u", "cx", "cz", "cp", "crz", "swap", "ccx",
]


def random_circuit(rng: np.random.Generator, num_qubits: int, num_gates: int) -> Circuit:
    """Random circuit over the full catalog, angles in [-2pi, 2pi)."""
    gates = []
    kinds = [GATE_BY_NAME[k] for k in RANDOM_KINDS if GATE_BY_NAME[k].num_qubits <= num_qubits]
    for pos in range(num_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        qubits = tuple(int(q) for q in rng.choice(num_qubits, size=kind.num_qubits, replace=False))
        params = tuple(float(a) for a in rng.uniform(-2 * math.pi, 2 * math.pi, kind.param_count))
        gates.append(GateApp(kind, qubits, params, position=pos))
    return Circuit(num_qubits=num_qubits, gates=tuple(gates))


@pytest.fixture
def bell() -> Circuit:
    return build_circuit(2, [("h", (0,)), ("cx", (0, 1))])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
