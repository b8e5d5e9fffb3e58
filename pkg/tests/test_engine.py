"""Repair-engine orchestration: budgets, pruning, reports, RS baseline."""
import math

import pytest

from qrep.benchmarks import build_benchmark
from qrep.circuit import GateApp, GateKind, build_circuit, insert_gate, replace_gate
from qrep.engine import (
    STATUS_NOT_FIXED,
    STATUS_REPAIRED,
    Budget,
    RepairConfig,
    pruning_keep_fraction,
    random_search,
    repair,
)
from qrep.errors import NoFailingTestError
from qrep.localizer import BudgetExhaustedError, gate_id
from qrep.qasm import parse_qasm
from qrep.testkit import OracleConfig, fitness, generate_suite


@pytest.fixture()
def bell_suite(bell):
    return generate_suite(bell)


def cfg_evals(n, **kw):
    kw.setdefault("iterations", 4)
    return RepairConfig(budget_evals=n, **kw)


# ------------------------------------------------------------------ config

def test_config_requires_exactly_one_budget():
    with pytest.raises(ValueError):
        RepairConfig()
    with pytest.raises(ValueError):
        RepairConfig(budget_evals=10, budget_seconds=1.0)
    RepairConfig(budget_evals=10)
    RepairConfig(budget_seconds=1.0)


def test_config_validation_ranges():
    for bad in (
        dict(budget_evals=0),
        dict(budget_seconds=0.0),
        dict(budget_evals=10, iterations=0),
        dict(budget_evals=10, top_k=0),
        dict(budget_evals=10, threads=0),
    ):
        with pytest.raises(ValueError):
            RepairConfig(**bad)


def test_budget_ledger_semantics():
    with pytest.raises(ValueError):
        Budget()
    b = Budget(max_evals=2)
    b.precheck(); b.charge()
    b.precheck(); b.charge()
    with pytest.raises(BudgetExhaustedError):
        b.precheck()
    assert b.evals_used == 2


# --------------------------------------------------------------- pruning

def test_pruning_keep_fraction_examples():
    assert pruning_keep_fraction(1, 4) == 0.75
    assert pruning_keep_fraction(2, 4) == 0.5
    assert pruning_keep_fraction(4, 4) == 0.0
    assert math.ceil(pruning_keep_fraction(2, 4) * 10) == 5


def test_pruning_keep_fraction_bounds():
    with pytest.raises(ValueError):
        pruning_keep_fraction(0, 4)
    with pytest.raises(ValueError):
        pruning_keep_fraction(5, 4)


# --------------------------------------------------- repair: example cases

def test_spurious_z_repaired_by_removal(bell, bell_suite):
    broken = insert_gate(bell, 2, GateApp(GateKind.Z, (1,)))
    rep = repair(broken, bell_suite, cfg_evals(200))
    assert rep.status == STATUS_REPAIRED
    assert rep.improvement_pct == 100.0
    # the winning edit is the localisation-phase removal, reported as delete
    assert rep.best_patches[0]["kind"] == "delete"
    assert rep.best_patches[0]["position"] == 2
    assert rep.best_patches[0]["gate"] == "z"
    assert rep.evals_used <= 1 + 3  # baseline plus at most one sweep


def test_h_to_x_repaired_by_replace(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(2000))
    assert rep.status == STATUS_REPAIRED
    best = rep.best_patches[0]
    assert (best["kind"], best["position"], best["gate"], best["qubits"]) == ("replace", 0, "h", [0])
    assert best["fitness"] == 0.0


def test_repaired_circuit_reverifies(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(2000))
    assert rep.repaired_qasm is not None
    fixed = parse_qasm(rep.repaired_qasm)
    assert fitness(fixed, bell_suite).all_passed()


def test_ghz_cx_swap_small_budget_invariants():
    ref = build_benchmark("ghz", 3)
    ts = generate_suite(ref)
    broken = replace_gate(ref, 1, GateApp(GateKind.CX, (1, 0)))
    fault = gate_id(broken.gates[1])
    rep = repair(broken, ts, cfg_evals(50), fault_gate=fault)
    assert rep.status in (STATUS_REPAIRED, STATUS_NOT_FIXED)
    assert 0.0 <= rep.improvement_pct <= 100.0
    assert len(rep.ranking) == len(broken.gates)
    assert rep.fault_percentile is not None
    assert 0.0 <= rep.fault_percentile <= 100.0
    assert rep.evals_used <= 50


def test_not_fixed_report_shape(bell, bell_suite):
    # budget 4 = baseline + 2-gate sweep + one patch: too small to fix
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(4))
    assert rep.status == STATUS_NOT_FIXED
    assert rep.repaired_qasm is None
    assert rep.evals_used == 4  # exhausted exactly
    base = fitness(broken, bell_suite).value
    fits = [p["fitness"] for p in rep.best_patches]
    assert fits == sorted(fits)
    assert all(f <= base for f in fits)


def test_requires_failing_input(bell, bell_suite):
    with pytest.raises(NoFailingTestError):
        repair(bell, bell_suite, cfg_evals(100))


def test_budget_one_flags_partial_localisation(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(1))
    assert rep.status == STATUS_NOT_FIXED
    assert rep.partial_localisation
    assert rep.evals_used == 1
    assert rep.best_patches == []
    assert rep.improvement_pct == 0.0


def test_budget_exactness_sweep(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    for n in (1, 2, 3, 5, 17, 40):
        rep = repair(broken, bell_suite, cfg_evals(n))
        assert rep.evals_used <= n


def test_each_patch_tried_at_most_once(bell, bell_suite):
    # fixed-gate catalog: every candidate row is one queue entry; no repeats
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(5000, patch_catalog=("x", "y", "z", "h", "s", "t")))
    tried = [
        (p["kind"], p["position"], p["gate"], tuple(p["qubits"]))
        for p in rep.best_patches
        if p["kind"] != "delete"
    ]
    assert len(tried) == len(set(tried))


def test_report_key_order(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(20))
    assert list(rep.to_dict().keys()) == [
        "status",
        "repaired_qasm",
        "best_patches",
        "ranking",
        "improvement_pct",
        "fault_percentile",
        "evals_used",
        "wall_seconds",
        "partial_localisation",
        "config",
    ]
    entry = rep.to_dict()["ranking"][0]
    assert set(entry) == {"gate_id", "score", "percentile"}


def test_fault_percentile_absent_without_ground_truth(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = repair(broken, bell_suite, cfg_evals(10))
    assert rep.fault_percentile is None


def test_repair_deterministic(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    a = repair(broken, bell_suite, cfg_evals(60, seed=4)).to_dict()
    b = repair(broken, bell_suite, cfg_evals(60, seed=4)).to_dict()
    a.pop("wall_seconds"); b.pop("wall_seconds")
    assert a == b


def test_threads_do_not_change_results(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    solo = repair(broken, bell_suite, cfg_evals(60)).to_dict()
    multi = repair(broken, bell_suite, cfg_evals(60, threads=3)).to_dict()
    solo.pop("wall_seconds"); multi.pop("wall_seconds")
    solo_cfg = solo.pop("config"); multi_cfg = multi.pop("config")
    assert solo == multi
    assert solo_cfg["threads"] == 1 and multi_cfg["threads"] == 3


def test_seconds_budget_mode_smoke(bell, bell_suite):
    broken = insert_gate(bell, 2, GateApp(GateKind.Z, (1,)))
    rep = repair(broken, bell_suite, RepairConfig(budget_seconds=30.0))
    assert rep.status == STATUS_REPAIRED  # removal sweep finds it immediately
    assert rep.wall_seconds < 30.0


def test_optimizer_evals_are_charged(bell, bell_suite):
    # parametric-only catalog: every trial spends optimizer evaluations
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    n = 30
    rep = repair(broken, bell_suite, cfg_evals(n, patch_catalog=("rx", "ry", "rz")))
    assert rep.evals_used <= n
    if rep.status == STATUS_NOT_FIXED:
        assert rep.evals_used == n


# ------------------------------------------------------------ random search

def test_rs_deterministic_same_seed(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    a = random_search(broken, bell_suite, cfg_evals(80, seed=9)).to_dict()
    b = random_search(broken, bell_suite, cfg_evals(80, seed=9)).to_dict()
    a.pop("wall_seconds"); b.pop("wall_seconds")
    assert a == b


def test_rs_eventually_repairs_h_to_x(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = random_search(broken, bell_suite, cfg_evals(5000, seed=0))
    assert rep.status == STATUS_REPAIRED
    fixed = parse_qasm(rep.repaired_qasm)
    assert fitness(fixed, bell_suite).all_passed()


def test_rs_zero_remaining_budget(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = random_search(broken, bell_suite, cfg_evals(1))
    assert rep.status == STATUS_NOT_FIXED
    assert rep.evals_used == 1  # the baseline consumed everything
    assert rep.best_patches == []


def test_rs_budget_exact_on_exhaustion(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    rep = random_search(broken, bell_suite, cfg_evals(25, seed=1))
    assert rep.evals_used <= 25
    if rep.status == STATUS_NOT_FIXED:
        assert rep.evals_used == 25


def test_rs_different_seeds_differ(bell, bell_suite):
    broken = replace_gate(bell, 0, GateApp(GateKind.X, (0,)))
    a = random_search(broken, bell_suite, cfg_evals(40, seed=0))
    b = random_search(broken, bell_suite, cfg_evals(40, seed=123))
    assert a.best_patches != b.best_patches or a.status != b.status


# ------------------------------------------------------- sampled-mode smoke

def test_sampled_oracle_end_to_end(bell, bell_suite):
    broken = insert_gate(bell, 2, GateApp(GateKind.Z, (1,)))
    ts = generate_suite(bell)
    cfg = RepairConfig(budget_evals=300, oracle=OracleConfig(mode="sampled", seed=5))
    rep = repair(broken, ts, cfg)
    assert rep.status in (STATUS_REPAIRED, STATUS_NOT_FIXED)
    assert rep.evals_used <= 300
