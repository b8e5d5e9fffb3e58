"""Command-line front end: repair, localize, mutate, baseline-rs.

Reports are JSON with a manifest block (subcommand, inputs, config, seed,
tool version, timestamp); the timestamp is the only intentionally
nondeterministic field besides measured wall time. Exit codes: 0 repaired
or success, 2 not fixed, 1 any error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .engine import (
    STATUS_REPAIRED,
    RepairConfig,
    random_search,
    repair,
)
from .errors import QRepError
from .localizer import GateId, localize
from .optimizer import OptBudget
from .patcher import DEFAULT_MUTATION_CATALOG, DEFAULT_PATCH_CATALOG, inject_faults
from .qasm import emit_qasm, parse_qasm
from .testkit import OracleConfig, fitness, generate_suite, suite_from_expected

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_FIXED = 2


class _Parser(argparse.ArgumentParser):
    # the exit-code contract reserves 2 for NotFixed, so usage errors exit 1
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _default_threads() -> int:
    env = os.environ.get("QREP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat()


def _manifest(subcommand: str, inputs: dict, config: dict | None, seed: int) -> dict:
    return {
        "subcommand": subcommand,
        "inputs": inputs,
        "config": config,
        "seed": seed,
        "tool_version": __version__,
        "timestamp": _timestamp(),
    }


def _write_json(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_circuit(path: str):
    return parse_qasm(Path(path).read_text())


def _load_suite(args):
    if getattr(args, "reference", None):
        return generate_suite(_load_circuit(args.reference))
    with open(args.expected) as fh:
        return suite_from_expected(json.load(fh))


def _parse_fault_gate(text: str) -> GateId:
    try:
        pos_s, gate, qubits_s = text.split(":")
        qubits = tuple(int(q) for q in qubits_s.split("-"))
        return GateId(position=int(pos_s), gate=gate, qubits=qubits)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"bad gate id {text!r}; expected like '2:cx:0-1'"
        ) from None


def _parse_catalog(text: str) -> tuple[str, ...]:
    names = tuple(n.strip() for n in text.split(",") if n.strip())
    if not names:
        raise argparse.ArgumentTypeError("catalog must name at least one gate")
    return names


def _add_oracle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--shots-mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--shots", type=_positive_int, default=None, help="override sampled-mode shot count")
    p.add_argument("--tau-fail", type=_positive_float, default=None, help="override the failure threshold")
    p.add_argument("--eps-zero", type=_positive_float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)


def _add_repair_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--circuit", required=True, help="faulty circuit (OpenQASM 2)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--reference", help="reference circuit giving expected behavior")
    group.add_argument("--expected", help="expected-distribution JSON {case_id: {bits: prob}}")
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--budget-evals", type=_positive_int, default=None)
    budget.add_argument("--budget-seconds", type=_positive_float, default=None)
    p.add_argument("--iterations", type=_positive_int, default=4)
    p.add_argument("--opt-max-evals", type=_positive_int, default=20)
    p.add_argument("--opt-tol", type=_positive_float, default=1e-3)
    p.add_argument("--top-k", type=_positive_int, default=10)
    p.add_argument("--catalog", type=_parse_catalog, default=DEFAULT_PATCH_CATALOG)
    p.add_argument("--threads", type=_positive_int, default=_default_threads())
    p.add_argument("--fault-gate", type=_parse_fault_gate, default=None,
                   help="ground-truth gate id like '2:cx:0-1' for rank metrics")
    p.add_argument("--out", default=None, help="report path (stdout when omitted)")
    _add_oracle_flags(p)


def _oracle_from_args(args) -> OracleConfig:
    return OracleConfig(
        mode=args.shots_mode,
        tau_fail=args.tau_fail,
        eps_zero=args.eps_zero,
        shots=args.shots,
        seed=args.seed,
    )


def _config_from_args(args) -> RepairConfig:
    return RepairConfig(
        budget_evals=args.budget_evals,
        budget_seconds=args.budget_seconds,
        iterations=args.iterations,
        opt=OptBudget(max_evals=args.opt_max_evals, tolerance=args.opt_tol),
        oracle=_oracle_from_args(args),
        seed=args.seed,
        top_k=args.top_k,
        patch_catalog=args.catalog,
        threads=args.threads,
    )


def _repair_like(args, engine_fn, subcommand: str) -> int:
    c = _load_circuit(args.circuit)
    ts = _load_suite(args)
    cfg = _config_from_args(args)
    report = engine_fn(c, ts, cfg, fault_gate=args.fault_gate)
    inputs = {
        "circuit": args.circuit,
        "reference": getattr(args, "reference", None),
        "expected": getattr(args, "expected", None),
    }
    payload = {"manifest": _manifest(subcommand, inputs, cfg.to_dict(), args.seed)}
    payload.update(report.to_dict())
    _write_json(payload, args.out)
    if report.status == STATUS_REPAIRED and args.out and report.repaired_qasm:
        fixed = Path(args.out).with_suffix(".repaired.qasm")
        fixed.write_text(report.repaired_qasm)
    return EXIT_OK if report.status == STATUS_REPAIRED else EXIT_NOT_FIXED


def _cmd_repair(args) -> int:
    return _repair_like(args, repair, "repair")


def _cmd_baseline_rs(args) -> int:
    return _repair_like(args, random_search, "baseline-rs")


def _cmd_localize(args) -> int:
    c = _load_circuit(args.circuit)
    ts = _load_suite(args)
    oracle = _oracle_from_args(args)
    baseline = fitness(c, ts, oracle)
    result = localize(c, ts, baseline, evaluate=lambda cand: fitness(cand, ts, oracle))
    table = result.table
    ranking = [
        {
            "gate_id": str(g),
            "score": float(table.scores[g]),
            "percentile": table.rank_percentile(g),
        }
        for g in table.ranking()
    ]
    inputs = {
        "circuit": args.circuit,
        "reference": getattr(args, "reference", None),
        "expected": getattr(args, "expected", None),
    }
    payload = {
        "manifest": _manifest("localize", inputs, None, args.seed),
        "baseline_fitness": baseline.value,
        "ranking": ranking,
        "repaired_qasm": emit_qasm(result.repaired) if result.repaired else None,
        "repaired_by_removing": str(result.repaired_by_removing) if result.repaired_by_removing else None,
        "evals_used": result.evals_used + 1,  # sweep plus the baseline evaluation
        "wall_seconds": result.wall_seconds,
    }
    _write_json(payload, args.out)
    if result.repaired is not None and args.out:
        fixed = Path(args.out).with_suffix(".repaired.qasm")
        fixed.write_text(emit_qasm(result.repaired))
    return EXIT_OK


def _cmd_mutate(args) -> int:
    c = _load_circuit(args.circuit)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = []
    if args.per_group > 0:
        records = inject_faults(c, seed=args.seed, per_group=args.per_group, catalog=args.catalog)
    entries = []
    for i, rec in enumerate(records):
        fname = f"mutant_{rec.group}_{i}.qasm"
        (out_dir / fname).write_text(emit_qasm(rec.mutant))
        entries.append(
            {
                "file": fname,
                "group": rec.group,
                "description": rec.description,
                "fault_gate": str(rec.fault_gate) if rec.fault_gate else None,
                "fitness": rec.fitness_value,
                "failed_count": rec.failed_count,
            }
        )
    payload = {
        "manifest": _manifest(
            "mutate",
            {"circuit": args.circuit},
            {"per_group": args.per_group, "catalog": list(args.catalog)},
            args.seed,
        ),
        "mutants": entries,
    }
    _write_json(payload, str(out_dir / "manifest.json"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qrep {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_repair = sub.add_parser("repair", help="search for a single-gate fix")
    _add_repair_flags(p_repair)
    p_repair.set_defaults(fn=_cmd_repair)

    p_rs = sub.add_parser("baseline-rs", help="random-search baseline, same report format")
    _add_repair_flags(p_rs)
    p_rs.set_defaults(fn=_cmd_baseline_rs)

    p_loc = sub.add_parser("localize", help="suspiciousness ranking only")
    p_loc.add_argument("--circuit", required=True)
    group = p_loc.add_mutually_exclusive_group(required=True)
    group.add_argument("--reference")
    group.add_argument("--expected")
    p_loc.add_argument("--out", default=None)
    _add_oracle_flags(p_loc)
    p_loc.set_defaults(fn=_cmd_localize)

    p_mut = sub.add_parser("mutate", help="generate a seeded mutant corpus")
    p_mut.add_argument("--circuit", required=True)
    p_mut.add_argument("--per-group", type=_nonneg_int, required=True)
    p_mut.add_argument("--seed", type=int, default=0)
    p_mut.add_argument("--catalog", type=_parse_catalog, default=DEFAULT_MUTATION_CATALOG)
    p_mut.add_argument("--out-dir", required=True)
    p_mut.set_defaults(fn=_cmd_mutate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except QRepError as e:
        print(f"qrep: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as e:
        print(f"qrep: error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except json.JSONDecodeError as e:
        print(f"qrep: error: bad JSON input: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
