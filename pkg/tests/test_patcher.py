"""Patch enumeration, ordering, apply/revert, and the fault injector."""
import math
from collections import Counter

import pytest

from qrep.circuit import GateApp, GateKind, build_circuit
from qrep.errors import NoNonEquivalentMutantError
from qrep.localizer import GateId, gate_id
from qrep.patcher import (
    DEFAULT_MUTATION_CATALOG,
    DEFAULT_PATCH_CATALOG,
    Patch,
    PatchQueue,
    apply_patch,
    generate_patches,
    inject_faults,
    order_uniform,
    prune_to_gates,
    revert_patch,
)
from qrep.testkit import fitness, generate_suite


# ------------------------------------------------------------- enumeration

def test_pool_for_single_gate_tiny_catalog():
    c = build_circuit(1, [("h", 0)])
    pool = generate_patches(c, catalog=("x", "h"))
    got = {(p.kind, p.position, p.gate.gate_name) for p in pool}
    # adds at both insertion points, replaces excluding the no-op h->h
    assert got == {
        ("add", 0, "x"), ("add", 0, "h"),
        ("add", 1, "x"), ("add", 1, "h"),
        ("replace", 0, "x"),
    }
    assert len(pool) == 5


def test_pool_excludes_parametric_noop_exemption():
    # identical parametric kind is kept: new angles may differ
    c = build_circuit(1, [("rx", 0, (0.5,))])
    pool = generate_patches(c, catalog=("rx",))
    kinds = [(p.kind, p.gate.gate_name) for p in pool]
    assert ("replace", "rx") in kinds


def test_pool_qubit_choices_are_ordered_pairs():
    c = build_circuit(2, [("h", 0)])
    pool = generate_patches(c, catalog=("cx",))
    pairs = {p.qubits for p in pool if p.kind == "add" and p.position == 0}
    assert pairs == {(0, 1), (1, 0)}


def test_pool_filters_kinds_wider_than_circuit():
    c = build_circuit(1, [("h", 0)])
    pool = generate_patches(c, catalog=("x", "cx"))
    assert all(p.gate.num_qubits <= 1 for p in pool)


def test_pool_rejects_non_unitary_catalog():
    c = build_circuit(1, [("h", 0)])
    with pytest.raises(ValueError):
        generate_patches(c, catalog=("measure",))


def test_add_anchors_point_at_displaced_gate():
    c = build_circuit(1, [("h", 0), ("t", 0)])
    pool = generate_patches(c, catalog=("x",))
    by_pos = {p.position: p.anchor for p in pool if p.kind == "add"}
    assert by_pos[0] == gate_id(c.gates[0])
    assert by_pos[1] == gate_id(c.gates[1])
    assert by_pos[2] == gate_id(c.gates[1])  # append anchors to the last gate


def test_add_anchor_none_on_empty_circuit():
    c = build_circuit(1, [])
    pool = generate_patches(c, catalog=("x",))
    assert all(p.anchor is None for p in pool)


def test_replace_anchor_is_the_replaced_gate():
    c = build_circuit(1, [("h", 0)])
    pool = generate_patches(c, catalog=("x",))
    rep = [p for p in pool if p.kind == "replace"]
    assert rep and all(p.anchor == gate_id(c.gates[0]) for p in rep)


# ---------------------------------------------------------------- ordering

def test_order_uniform_is_a_permutation(bell):
    pool = generate_patches(bell)
    before = Counter((p.kind, p.position, p.gate.gate_name, p.qubits) for p in pool)
    ordered = order_uniform(pool, bell)
    after = Counter((p.kind, p.position, p.gate.gate_name, p.qubits) for p in ordered)
    assert before == after


def test_order_uniform_spreads_positions_early(bell):
    ordered = order_uniform(generate_patches(bell), bell).remaining()
    early = ordered[: len(bell.gates) + 1]
    # the first few draws cover distinct circuit positions, not one hot spot
    assert len({p.position for p in early}) == len(early)


def test_order_uniform_alternates_add_replace(bell):
    ordered = order_uniform(generate_patches(bell), bell).remaining()
    kinds = [p.kind for p in ordered[:8]]
    assert "add" in kinds and "replace" in kinds


def test_order_uniform_spreads_gate_kinds():
    c = build_circuit(1, [("h", 0)])
    ordered = order_uniform(generate_patches(c, catalog=("x", "y", "z")), c).remaining()
    first_three_adds = [p.gate.gate_name for p in ordered if p.kind == "add"][:3]
    assert len(set(first_three_adds)) == 3


def test_order_uniform_deterministic(bell):
    a = order_uniform(generate_patches(bell), bell).remaining()
    b = order_uniform(generate_patches(bell), bell).remaining()
    assert a == b


def test_order_uniform_empty():
    c = build_circuit(1, [])
    assert len(order_uniform(PatchQueue([]), c)) == 0


# ------------------------------------------------------------------- queue

def test_queue_consumption():
    c = build_circuit(1, [("h", 0)])
    q = generate_patches(c, catalog=("x", "h"))
    n = len(q)
    first = q.popleft()
    assert len(q) == n - 1
    assert first not in q.remaining() or q.remaining().count(first) < n
    for _ in range(n - 1):
        q.popleft()
    with pytest.raises(IndexError):
        q.popleft()


def test_prune_keeps_only_anchored(bell):
    pool = order_uniform(generate_patches(bell), bell)
    keep = {gate_id(bell.gates[0])}
    pruned = prune_to_gates(pool, keep)
    assert len(pruned) > 0
    assert all(p.anchor in keep for p in pruned)
    order = [p for p in pool.remaining() if p.anchor in keep]
    assert pruned.remaining() == order  # relative order preserved


# ------------------------------------------------------------ apply/revert

def test_apply_revert_exhaustive_over_pool(bell):
    pool = generate_patches(bell)
    for p in pool:
        params = (0.3,) * p.gate.param_count if p.is_parametric else None
        edited = apply_patch(bell, p, params)
        assert len(edited.gates) == len(bell.gates) + (1 if p.kind == "add" else 0)
        restored = revert_patch(edited, p, bell)
        assert restored.gates == bell.gates


def test_apply_parametric_requires_params():
    c = build_circuit(1, [("h", 0)])
    p = Patch("add", 0, GateKind.RX, (0,))
    assert p.is_parametric
    with pytest.raises(Exception):
        apply_patch(c, p)  # no angles anywhere
    out = apply_patch(c, p, (math.pi,))
    assert out.gates[0].params == (math.pi,)


def test_patch_describe():
    p = Patch("replace", 2, GateKind.CX, (0, 1))
    assert p.describe() == "replace cx q0,q1 @2"


def test_apply_rejects_unknown_kind(bell):
    p = Patch("swap_out", 0, GateKind.X, (0,))
    with pytest.raises(ValueError):
        apply_patch(bell, p)
    with pytest.raises(ValueError):
        revert_patch(bell, p, bell)


# ---------------------------------------------------------- fault injection

def test_inject_faults_deterministic(bell):
    a = inject_faults(bell, seed=5, per_group=2)
    b = inject_faults(bell, seed=5, per_group=2)
    assert [r.description for r in a] == [r.description for r in b]
    assert [r.mutant.gates for r in a] == [r.mutant.gates for r in b]


def test_inject_faults_seed_changes_sample(bell):
    a = inject_faults(bell, seed=0, per_group=3)
    b = inject_faults(bell, seed=1, per_group=3)
    assert [r.description for r in a] != [r.description for r in b]


def test_inject_faults_groups_and_nonequivalence(bell):
    ts = generate_suite(bell)
    records = inject_faults(bell, seed=7, per_group=2)
    assert [r.group for r in records] == ["add", "add", "remove", "remove", "replace", "replace"]
    for r in records:
        assert r.failed_count >= 1
        score = fitness(r.mutant, ts)
        assert score.failed_count == r.failed_count
        assert score.value == pytest.approx(r.fitness_value)
        assert r.fault_gate is not None
        # the recorded fault identity exists in the mutant
        assert any(gate_id(g) == r.fault_gate for g in r.mutant.gates)


def test_inject_faults_mutation_catalog_is_fixed_gates_only():
    for name in DEFAULT_MUTATION_CATALOG:
        assert name in DEFAULT_PATCH_CATALOG
    records = inject_faults(build_circuit(2, [("h", 0), ("cx", (0, 1))]), seed=3, per_group=4)
    for r in records:
        if r.group == "add":
            g = r.mutant.gates[r.fault_gate.position]
            assert g.kind.gate_name in DEFAULT_MUTATION_CATALOG


def test_inject_faults_remove_points_at_neighbour():
    c = build_circuit(1, [("h", 0), ("t", 0)])
    recs = [r for r in inject_faults(c, seed=0, per_group=4) if r.group == "remove"]
    for r in recs:
        assert r.fault_gate is not None
        assert 0 <= r.fault_gate.position < len(r.mutant.gates)


def test_inject_faults_skips_equivalent_mutants():
    # a lone H: swapping it for another H-like sequence may pass; whatever is
    # returned must genuinely fail the suite
    c = build_circuit(1, [("h", 0)])
    for r in inject_faults(c, seed=2, per_group=5):
        assert r.failed_count >= 1


def test_inject_faults_zero_per_group(bell):
    assert inject_faults(bell, seed=0, per_group=0) == []


def test_inject_faults_all_equivalent_raises():
    # reference with no gates: "remove" has no candidates, "add" candidates all
    # differ; use a 1-qubit empty circuit where adds exist and all fail -> ok.
    # To hit the error we need candidates that all pass: add-only group with a
    # catalog whose sole gate is a no-op on the all-basis suite doesn't exist,
    # so assert the empty-candidate path instead: no gates, remove group only.
    c = build_circuit(1, [])
    assert inject_faults(c, seed=0, per_group=2, groups=("remove",)) == []


def test_inject_faults_equivalent_only_pool_raises():
    # z on |0> is invisible in the Z basis but not in X/Y, so build a true
    # equivalent-only pool: replace rz(theta) by rz(theta') on a diagonal
    # circuit measured... simpler: global-phase-only mutants. t -> s on |0>
    # changes nothing measured anywhere? s|0>=|0>, t|0>=|0>: both invisible.
    ref = build_circuit(1, [("t", 0)])
    with pytest.raises(NoNonEquivalentMutantError):
        inject_faults(ref, seed=0, per_group=1, catalog=("s", "t"), groups=("remove",))
