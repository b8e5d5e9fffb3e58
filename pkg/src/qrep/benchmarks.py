"""Reference circuit generators for the benchmark families.

Each builder returns a measured reference circuit from which test suites
and mutant corpora are derived. Constructions stick to the supported gate
set; sizes are capped only where the gate set runs out (grover's
multi-controlled phase needs at most a ccx).
"""
from __future__ import annotations

import math

from .circuit import Circuit, build_circuit


def ghz(n: int) -> Circuit:
    """|0..0> + |1..1> entangler: h on qubit 0, then a cx fan-out."""
    if n < 2:
        raise ValueError("ghz needs >= 2 qubits")
    ops = [("h", (0,))]
    ops += [("cx", (0, i)) for i in range(1, n)]
    return build_circuit(n, ops)


def dj(n: int) -> Circuit:
    """Deutsch-Jozsa with a balanced parity oracle; output is all-ones."""
    if n < 2:
        raise ValueError("dj needs >= 2 qubits")
    ops = [("h", (i,)) for i in range(n)]
    ops += [("z", (i,)) for i in range(n)]  # phase oracle for f(x) = parity(x)
    ops += [("h", (i,)) for i in range(n)]
    return build_circuit(n, ops)


def graphstate(n: int) -> Circuit:
    """Ring graph state: plus states entangled by cz along ring edges."""
    if n < 2:
        raise ValueError("graphstate needs >= 2 qubits")
    ops = [("h", (i,)) for i in range(n)]
    if n == 2:
        ops.append(("cz", (0, 1)))
    else:
        ops += [("cz", (i, (i + 1) % n)) for i in range(n)]
    return build_circuit(n, ops)


def wstate(n: int) -> Circuit:
    """Uniform one-hot superposition via the ry/cz cascade construction."""
    if n < 2:
        raise ValueError("wstate needs >= 2 qubits")
    ops: list = [("x", (n - 1,))]
    for m in range(1, n):
        i, j = n - m, n - m - 1
        theta = math.acos(math.sqrt(1.0 / (n - m + 1)))
        ops.append(("ry", (j,), (-theta,)))
        ops.append(("cz", (i, j)))
        ops.append(("ry", (j,), (theta,)))
    for k in range(n - 1, 0, -1):
        ops.append(("cx", (k - 1, k)))
    return build_circuit(n, ops)


def qft(n: int) -> Circuit:
    """Quantum Fourier transform with final qubit-reversal swaps."""
    if n < 2:
        raise ValueError("qft needs >= 2 qubits")
    ops: list = []
    for j in range(n):
        ops.append(("h", (j,)))
        for k in range(j + 1, n):
            ops.append(("cp", (k, j), (math.pi / 2 ** (k - j),)))
    for i in range(n // 2):
        ops.append(("swap", (i, n - 1 - i)))
    return build_circuit(n, ops)


def _mcz(n: int) -> list:
    # phase-flip on |1..1>; bounded by the ccx in the gate set
    if n == 2:
        return [("cz", (0, 1))]
    if n == 3:
        return [("h", (2,)), ("ccx", (0, 1, 2)), ("h", (2,))]
    raise ValueError("grover supports at most 3 qubits with this gate set")


def grover(n: int) -> Circuit:
    """Grover search marking |1..1>, with the textbook iteration count."""
    if n < 2:
        raise ValueError("grover needs >= 2 qubits")
    iterations = max(1, math.floor(math.pi / 4 * math.sqrt(2**n)))
    ops: list = [("h", (i,)) for i in range(n)]
    for _ in range(iterations):
        ops += _mcz(n)  # oracle
        ops += [("h", (i,)) for i in range(n)]
        ops += [("x", (i,)) for i in range(n)]
        ops += _mcz(n)
        ops += [("x", (i,)) for i in range(n)]
        ops += [("h", (i,)) for i in range(n)]
    return build_circuit(n, ops)


BENCHMARKS = {
    "ghz": ghz,
    "dj": dj,
    "graphstate": graphstate,
    "wstate": wstate,
    "qft": qft,
    "grover": grover,
}


def build_benchmark(name: str, n: int) -> Circuit:
    try:
        builder = BENCHMARKS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None
    return builder(n)


def standard_catalog() -> dict[str, Circuit]:
    """Ten references spanning 2-6 qubits, used by tests and scripts."""
    picks = [
        ("ghz", 2),
        ("ghz", 5),
        ("dj", 4),
        ("dj", 6),
        ("graphstate", 4),
        ("graphstate", 6),
        ("wstate", 3),
        ("wstate", 5),
        ("qft", 4),
        ("grover", 3),
    ]
    return {f"{name}{n}": build_benchmark(name, n) for name, n in picks}
