"""Test-suite generation, the pass/fail oracle, and the fitness function.

A suite holds one test case per (classical input, measurement basis) pair,
3 * 2^q cases total. A case fails when the observed output contains an
outcome the expected distribution rules out, or when its Hellinger distance
from the expected distribution exceeds the failure threshold. Fitness is the
failed-case count plus the Hellinger distances summed over every case.
"""
from __future__ import annotations

import math
from concurrent.futures import Executor
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .errors import NoFailingTestError, SuiteTooWideError, WidthMismatchError
from .simulator import Distribution, MeasBasis, default_shots, run_all_bases, sample

BASIS_ORDER = (MeasBasis.X, MeasBasis.Y, MeasBasis.Z)

DEFAULT_TAU_FAIL = 0.1
DEFAULT_EPS_ZERO = 1e-9
DEFAULT_MAX_SUITE_QUBITS = 16


@dataclass(frozen=True)
class TestCase:
    id: str
    input_state: int
    basis: MeasBasis
    expected: Distribution


@dataclass(frozen=True)
class TestSuite:
    num_qubits: int
    cases: tuple[TestCase, ...]
    reference: Circuit | None = None

    def __len__(self) -> int:
        return len(self.cases)


@dataclass(frozen=True)
class Verdict:
    passed: bool
    hellinger: float
    wrong_output: bool


@dataclass(frozen=True)
class FitnessScore:
    failed_count: int
    hellinger_sum: float
    verdicts: tuple[Verdict, ...] = ()

    @property
    def value(self) -> float:
        return self.failed_count + self.hellinger_sum

    def all_passed(self) -> bool:
        return self.failed_count == 0


@dataclass(frozen=True)
class OracleConfig:
    """Evaluation policy: exact probabilities by default, sampling opt-in.

    ``tau_fail=None`` resolves to 0.1 in exact mode and 0.1 + 2/sqrt(shots)
    in sampled mode (widened to absorb shot noise).
    """

    mode: str = "exact"  # "exact" | "sampled"
    tau_fail: float | None = None
    eps_zero: float = DEFAULT_EPS_ZERO
    shots: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def resolve_shots(self, num_qubits: int) -> int:
        return self.shots if self.shots is not None else default_shots(num_qubits)

    def resolve_tau(self, num_qubits: int) -> float:
        if self.tau_fail is not None:
            return self.tau_fail
        if self.mode == "exact":
            return DEFAULT_TAU_FAIL
        return DEFAULT_TAU_FAIL + 2.0 / math.sqrt(self.resolve_shots(num_qubits))


def case_id(basis: MeasBasis, input_state: int, num_qubits: int) -> str:
    return f"{basis.value}:{format(input_state, f'0{num_qubits}b')}"


def parse_case_id(cid: str) -> tuple[MeasBasis, int, int]:
    """Inverse of :func:`case_id`: returns (basis, input_state, num_qubits)."""
    try:
        basis_s, bits = cid.split(":")
        basis = MeasBasis(basis_s)
        if set(bits) - {"0", "1"} or not bits:
            raise ValueError
    except ValueError:
        raise ValueError(f"bad test-case id {cid!r}; expected like 'Z:0010'") from None
    return basis, int(bits, 2), len(bits)


def generate_suite(
    reference: Circuit, max_qubits: int = DEFAULT_MAX_SUITE_QUBITS
) -> TestSuite:
    """All-inputs x all-bases suite with expected distributions from ``reference``."""
    q = reference.num_qubits
    if q > max_qubits:
        raise SuiteTooWideError(f"{q} qubits would need {3 * 2**q} test cases (max {max_qubits} qubits)")
    cases = []
    for input_state in range(2**q):
        by_basis = run_all_bases(reference, input_state)
        for basis in BASIS_ORDER:
            cases.append(
                TestCase(
                    id=case_id(basis, input_state, q),
                    input_state=input_state,
                    basis=basis,
                    expected=by_basis[basis],
                )
            )
    return TestSuite(num_qubits=q, cases=tuple(cases), reference=reference)


def suite_from_expected(expected: dict[str, dict[str, float]]) -> TestSuite:
    """Suite from an expected-distribution map {case_id: {bitstring: prob}}."""
    if not expected:
        raise ValueError("expected-distribution map is empty")
    cases = []
    width = None
    for cid in sorted(expected):
        basis, input_state, q = parse_case_id(cid)
        if width is None:
            width = q
        elif q != width:
            raise WidthMismatchError(f"case {cid!r} width {q} != {width}")
        dist = Distribution.from_dict(q, expected[cid])
        cases.append(TestCase(id=cid, input_state=input_state, basis=basis, expected=dist))
    return TestSuite(num_qubits=width, cases=tuple(cases), reference=None)


def hellinger(p: Distribution, q: Distribution) -> float:
    """(1/sqrt(2)) * ||sqrt(p) - sqrt(q)||_2, clamped to [0, 1]."""
    if p.num_qubits != q.num_qubits:
        raise WidthMismatchError(f"{p.num_qubits} vs {q.num_qubits} qubits")
    diff = np.sqrt(p.probs) - np.sqrt(q.probs)
    h = math.sqrt(float(np.dot(diff, diff))) / math.sqrt(2.0)
    return min(max(h, 0.0), 1.0)


def judge(
    observed: Distribution,
    tc: TestCase,
    tau_fail: float = DEFAULT_TAU_FAIL,
    eps_zero: float = DEFAULT_EPS_ZERO,
) -> Verdict:
    """Two-rule oracle: no unexpected outcomes, and distance within tau_fail."""
    if observed.num_qubits != tc.expected.num_qubits:
        raise WidthMismatchError(f"{observed.num_qubits} vs {tc.expected.num_qubits} qubits")
    wrong = bool(np.any((observed.probs > eps_zero) & (tc.expected.probs <= eps_zero)))
    h = hellinger(observed, tc.expected)
    return Verdict(passed=not wrong and h <= tau_fail, hellinger=h, wrong_output=wrong)


def _case_seed(master: int, index: int) -> int:
    # stable per-case stream so results do not depend on evaluation order
    return int(np.random.SeedSequence([master & (2**63 - 1), index]).generate_state(1)[0])


def fitness(
    c: Circuit,
    ts: TestSuite,
    cfg: OracleConfig = OracleConfig(),
    executor: Executor | None = None,
) -> FitnessScore:
    """Evaluate every test case; value = failed count + summed Hellinger.

    The sum accumulates in suite order so results are identical no matter how
    the per-input simulations are scheduled.
    """
    if c.num_qubits != ts.num_qubits:
        raise WidthMismatchError(f"circuit has {c.num_qubits} qubits, suite has {ts.num_qubits}")
    tau = cfg.resolve_tau(ts.num_qubits)
    shots = cfg.resolve_shots(ts.num_qubits) if cfg.mode == "sampled" else None

    inputs = sorted({tc.input_state for tc in ts.cases})
    if executor is not None and len(inputs) > 1:
        dists = dict(zip(inputs, executor.map(lambda s: run_all_bases(c, s), inputs)))
    else:
        dists = {s: run_all_bases(c, s) for s in inputs}

    verdicts = []
    failed = 0
    h_sum = 0.0
    for i, tc in enumerate(ts.cases):
        observed = dists[tc.input_state][tc.basis]
        if shots is not None:
            observed = sample(observed, shots, _case_seed(cfg.seed, i))
        v = judge(observed, tc, tau_fail=tau, eps_zero=cfg.eps_zero)
        verdicts.append(v)
        if not v.passed:
            failed += 1
        h_sum += v.hellinger
    return FitnessScore(failed_count=failed, hellinger_sum=h_sum, verdicts=tuple(verdicts))


def require_failing(score: FitnessScore, what: str = "circuit") -> None:
    if score.all_passed():
        raise NoFailingTestError(f"{what} passes the whole test suite; nothing to repair")
