"""Repair orchestration: budgeted search over single-gate edits.

The run charges every fitness evaluation (baseline, localisation sweep,
patch trials, optimizer probes) to one budget, expressed either as a
maximum evaluation count or as wall-clock seconds. After localisation the
remainder is split evenly across the configured iterations; each iteration
consumes ordered patches until its cumulative mark, then prunes the queue
to patches anchored on the currently most suspicious gates. A random-search
baseline shares the evaluator, stopping rules, and report format, but draws
patches in seeded random order with no localisation or pruning.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .localizer import (
    BudgetExhaustedError,
    GateId,
    SuspiciousnessTable,
    localize,
)
from .optimizer import OptBudget, minimize_params
from .patcher import (
    DEFAULT_PATCH_CATALOG,
    Patch,
    PatchQueue,
    apply_patch,
    generate_patches,
    order_uniform,
    prune_to_gates,
)
from .qasm import emit_qasm
from .testkit import FitnessScore, OracleConfig, TestSuite, fitness, require_failing

STATUS_REPAIRED = "Repaired"
STATUS_NOT_FIXED = "NotFixed"


@dataclass(frozen=True)
class RepairConfig:
    budget_evals: int | None = None
    budget_seconds: float | None = None
    iterations: int = 4
    opt: OptBudget = OptBudget()
    oracle: OracleConfig = OracleConfig()
    seed: int = 0
    top_k: int = 10
    patch_catalog: tuple[str, ...] = DEFAULT_PATCH_CATALOG
    threads: int = 1

    def __post_init__(self) -> None:
        if (self.budget_evals is None) == (self.budget_seconds is None):
            raise ValueError("set exactly one of budget_evals / budget_seconds")
        if self.budget_evals is not None and self.budget_evals < 1:
            raise ValueError("budget_evals must be >= 1")
        if self.budget_seconds is not None and self.budget_seconds <= 0:
            raise ValueError("budget_seconds must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return {
            "budget_evals": self.budget_evals,
            "budget_seconds": self.budget_seconds,
            "iterations": self.iterations,
            "opt_max_evals": self.opt.max_evals,
            "opt_tolerance": self.opt.tolerance,
            "oracle_mode": self.oracle.mode,
            "tau_fail": self.oracle.tau_fail,
            "eps_zero": self.oracle.eps_zero,
            "shots": self.oracle.shots,
            "oracle_seed": self.oracle.seed,
            "seed": self.seed,
            "top_k": self.top_k,
            "patch_catalog": list(self.patch_catalog),
            "threads": self.threads,
        }


@dataclass
class Budget:
    """Single-currency spend ledger; raises before an evaluation would
    exceed the cap, so evaluation-count budgets are exact."""

    max_evals: int | None = None
    max_seconds: float | None = None
    evals_used: int = 0
    started: float = field(default_factory=time.monotonic)

    def __post_init__(self) -> None:
        if (self.max_evals is None) == (self.max_seconds is None):
            raise ValueError("set exactly one of max_evals / max_seconds")

    @property
    def limit(self) -> float:
        return float(self.max_evals if self.max_evals is not None else self.max_seconds)

    @property
    def spent(self) -> float:
        if self.max_evals is not None:
            return float(self.evals_used)
        return time.monotonic() - self.started

    def precheck(self) -> None:
        if self.spent >= self.limit:
            raise BudgetExhaustedError(
                f"budget spent ({self.spent:g} of {self.limit:g})"
            )

    def charge(self) -> None:
        self.evals_used += 1


@dataclass
class EngineState:
    """Mutable mid-run snapshot, mostly useful for tests and debugging."""

    remaining_budget: float
    iteration_budget: float
    iteration: int
    table: SuspiciousnessTable
    queue: PatchQueue
    candidates: list["_Candidate"]
    evals_used: int


@dataclass
class _Candidate:
    kind: str  # "add" | "replace" | "delete"
    position: int
    gate: str
    qubits: tuple[int, ...]
    params: tuple[float, ...]
    fitness: float

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "position": self.position,
            "gate": self.gate,
            "qubits": list(self.qubits),
            "params": [float(p) for p in self.params],
            "fitness": self.fitness,
        }


@dataclass
class RepairReport:
    status: str
    repaired_qasm: str | None
    best_patches: list[dict]
    ranking: list[dict]
    improvement_pct: float
    fault_percentile: float | None
    evals_used: int
    wall_seconds: float
    partial_localisation: bool
    config: dict

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "repaired_qasm": self.repaired_qasm,
            "best_patches": self.best_patches,
            "ranking": self.ranking,
            "improvement_pct": self.improvement_pct,
            "fault_percentile": self.fault_percentile,
            "evals_used": self.evals_used,
            "wall_seconds": self.wall_seconds,
            "partial_localisation": self.partial_localisation,
            "config": self.config,
        }


def pruning_keep_fraction(i: int, total: int) -> float:
    """Fraction of the suspiciousness ranking retained after iteration i."""
    if not 1 <= i <= total:
        raise ValueError(f"iteration {i} outside 1..{total}")
    return 1.0 - i / total


class _FullPass(Exception):
    """Internal: a candidate passed the whole suite; unwind and report."""

    def __init__(self, circuit: Circuit, score: FitnessScore):
        self.circuit = circuit
        self.score = score


class _Run:
    def __init__(
        self,
        c_init: Circuit,
        ts: TestSuite,
        cfg: RepairConfig,
        fault_gate: GateId | None,
    ):
        self.c_init = c_init
        self.ts = ts
        self.cfg = cfg
        self.fault_gate = fault_gate
        self.budget = Budget(cfg.budget_evals, cfg.budget_seconds)
        self.executor = (
            ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None
        )
        self.table = SuspiciousnessTable.for_circuit(c_init)
        self.candidates: list[_Candidate] = []
        self.baseline: FitnessScore | None = None
        self.partial_localisation = False
        self.start = time.monotonic()

    def close(self) -> None:
        if self.executor is not None:
            self.executor.shutdown(wait=False)

    def evaluate(self, c: Circuit) -> FitnessScore:
        self.budget.precheck()
        self.budget.charge()
        return fitness(c, self.ts, self.cfg.oracle, executor=self.executor)

    def record_patch(self, patch: Patch, params: tuple[float, ...], value: float) -> None:
        self.candidates.append(
            _Candidate(patch.kind, patch.position, patch.gate.gate_name, patch.qubits, params, value)
        )

    def record_delete(self, gid: GateId, value: float) -> None:
        self.candidates.append(
            _Candidate("delete", gid.position, gid.gate, gid.qubits, (), value)
        )

    # -- patch trials ------------------------------------------------------

    def try_patch(self, patch: Patch) -> float:
        """Best fitness achieved by the patch; raises _FullPass on a repair
        and BudgetExhaustedError (after recording partial progress) when the
        allowance runs out mid-trial."""
        if not patch.is_parametric:
            cand = apply_patch(self.c_init, patch)
            score = self.evaluate(cand)
            self.record_patch(patch, patch.params or (), score.value)
            if score.all_passed():
                raise _FullPass(cand, score)
            return score.value

        best_value = math.inf
        best_params: tuple[float, ...] = ()
        # terminal outcomes are stashed instead of raised so no exception
        # crosses the solver's compiled frames
        full_pass: list[_FullPass] = []
        exhausted: list[BudgetExhaustedError] = []

        def objective(params: tuple[float, ...]) -> float:
            nonlocal best_value, best_params
            if full_pass or exhausted:
                return 1e18
            try:
                cand = apply_patch(self.c_init, patch, params)
                score = self.evaluate(cand)
            except BudgetExhaustedError as e:
                exhausted.append(e)
                return 1e18
            if score.value < best_value:
                best_value = score.value
                best_params = params
            if score.all_passed():
                self.record_patch(patch, params, score.value)
                full_pass.append(_FullPass(cand, score))
            return score.value

        minimize_params(objective, patch.gate.param_count, self.cfg.opt)
        if full_pass:
            raise full_pass[0]
        if exhausted:
            if best_value < math.inf:
                self.record_patch(patch, best_params, best_value)
            raise exhausted[0]
        self.record_patch(patch, best_params, best_value)
        return best_value

    def try_patch_random(self, patch: Patch, rng: np.random.Generator) -> float:
        """Random-search trial: parametric patches get max_evals uniform
        angle draws instead of the optimizer."""
        if not patch.is_parametric:
            return self.try_patch(patch)
        best_value = math.inf
        best_params: tuple[float, ...] = ()
        try:
            for _ in range(self.cfg.opt.max_evals):
                params = tuple(rng.uniform(0.0, 2.0 * math.pi, patch.gate.param_count).tolist())
                cand = apply_patch(self.c_init, patch, params)
                score = self.evaluate(cand)
                if score.value < best_value:
                    best_value = score.value
                    best_params = params
                if score.all_passed():
                    self.record_patch(patch, params, score.value)
                    raise _FullPass(cand, score)
        except BudgetExhaustedError:
            if best_value < math.inf:
                self.record_patch(patch, best_params, best_value)
            raise
        self.record_patch(patch, best_params, best_value)
        return best_value

    # -- report ------------------------------------------------------------

    def finalize(self, status: str, repaired: Circuit | None) -> RepairReport:
        assert self.baseline is not None
        base = self.baseline.value
        eligible = [c for c in self.candidates if c.fitness <= base]
        eligible.sort(key=lambda c: c.fitness)
        best = eligible[: self.cfg.top_k]
        if status == STATUS_REPAIRED:
            improvement = 100.0
        elif eligible:
            improvement = (base - eligible[0].fitness) / base * 100.0
            improvement = min(100.0, max(0.0, improvement))
        else:
            improvement = 0.0
        ranking = [
            {
                "gate_id": str(g),
                "score": float(self.table.scores[g]),
                "percentile": self.table.rank_percentile(g),
            }
            for g in self.table.ranking()
        ]
        fault_pct = None
        if self.fault_gate is not None and self.fault_gate in self.table.scores:
            fault_pct = self.table.rank_percentile(self.fault_gate)
        return RepairReport(
            status=status,
            repaired_qasm=emit_qasm(repaired) if repaired is not None else None,
            best_patches=[c.to_record() for c in best],
            ranking=ranking,
            improvement_pct=improvement,
            fault_percentile=fault_pct,
            evals_used=self.budget.evals_used,
            wall_seconds=time.monotonic() - self.start,
            partial_localisation=self.partial_localisation,
            config=self.cfg.to_dict(),
        )

    # -- drivers -----------------------------------------------------------

    def run_repair(self) -> RepairReport:
        self.baseline = self.evaluate(self.c_init)
        require_failing(self.baseline)

        loc = localize(self.c_init, self.ts, self.baseline, evaluate=self.evaluate)
        self.table = loc.table
        for gid, value in loc.removal_fitness.items():
            self.record_delete(gid, value)
        if loc.repaired is not None:
            return self.finalize(STATUS_REPAIRED, loc.repaired)
        if loc.partial:
            self.partial_localisation = True
            return self.finalize(STATUS_NOT_FIXED, None)

        queue = order_uniform(generate_patches(self.c_init, self.cfg.patch_catalog), self.c_init)
        spent0 = self.budget.spent
        b_r = self.budget.limit - spent0
        total = self.cfg.iterations
        state = EngineState(
            remaining_budget=b_r,
            iteration_budget=b_r / total,
            iteration=0,
            table=self.table,
            queue=queue,
            candidates=self.candidates,
            evals_used=self.budget.evals_used,
        )
        for i in range(1, total + 1):
            state.iteration = i
            end_mark = spent0 + b_r * (i / total)
            while len(queue) > 0 and self.budget.spent < end_mark:
                patch = queue.popleft()
                try:
                    value = self.try_patch(patch)
                except _FullPass as fp:
                    return self.finalize(STATUS_REPAIRED, fp.circuit)
                except BudgetExhaustedError:
                    return self.finalize(STATUS_NOT_FIXED, None)
                if patch.anchor is not None and patch.anchor in self.table.scores:
                    self.table.add(patch.anchor, self.baseline.value - value)
                state.evals_used = self.budget.evals_used
            if len(queue) == 0:
                break
            if i < total and self.table.scores:
                frac = pruning_keep_fraction(i, total)
                keep_n = max(1, math.ceil(frac * len(self.table.scores)))
                keep = set(self.table.ranking()[:keep_n])
                queue = prune_to_gates(queue, keep)
                state.queue = queue
        return self.finalize(STATUS_NOT_FIXED, None)

    def run_random_search(self) -> RepairReport:
        self.baseline = self.evaluate(self.c_init)
        require_failing(self.baseline)

        pool = generate_patches(self.c_init, self.cfg.patch_catalog).remaining()
        rng = np.random.default_rng([self.cfg.seed & (2**63 - 1), 17])
        order = rng.permutation(len(pool))
        for idx in order:
            patch = pool[int(idx)]
            try:
                value = self.try_patch_random(patch, rng)
            except _FullPass as fp:
                return self.finalize(STATUS_REPAIRED, fp.circuit)
            except BudgetExhaustedError:
                return self.finalize(STATUS_NOT_FIXED, None)
            if patch.anchor is not None and patch.anchor in self.table.scores:
                self.table.add(patch.anchor, self.baseline.value - value)
        return self.finalize(STATUS_NOT_FIXED, None)


def repair(
    c_init: Circuit,
    ts: TestSuite,
    cfg: RepairConfig,
    fault_gate: GateId | None = None,
) -> RepairReport:
    """Full pipeline: baseline, removal sweep, iterated patch search."""
    run = _Run(c_init, ts, cfg, fault_gate)
    try:
        return run.run_repair()
    finally:
        run.close()


def random_search(
    c_init: Circuit,
    ts: TestSuite,
    cfg: RepairConfig,
    fault_gate: GateId | None = None,
) -> RepairReport:
    """Evaluation-matched baseline: unordered seeded patch draws, random
    angles for parametric patches, no localisation or pruning."""
    run = _Run(c_init, ts, cfg, fault_gate)
    try:
        return run.run_random_search()
    finally:
        run.close()
