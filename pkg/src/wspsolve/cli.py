"""Command-line entry point: ``wsp solve | verify | generate | bench``.

Exit codes: 0 SAT / plan valid, 1 UNSAT / plan invalid, 2 usage or parse
error, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import oracle
from .errors import ParseError, RelationMismatch, ResourceLimit, SchemaError, ValidationError, WSPError
from .formats import Instance, emit_instance, emit_plan, parse_instance, parse_plan
from .generate import GeneratorConfig, generate_instance
from .model import Plan, first_violated
from .relations import IdentityRelation
from .solver import NAIVE_PLAN_BUDGET, resolve_relation, solve_naive, solve_pattern

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_LIMIT = 0, 1, 2, 3

BENCH_COLUMNS = (
    "seed", "k", "n", "m", "algorithm", "relation", "verdict",
    "patterns_peak", "plans_generated", "wall_time_ms",
)
ALGORITHMS = ("pattern", "naive", "oracle")
RELATIONS = ("auto", "ui", "equiv", "product", "identity")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _err(msg: str) -> None:
    print(f"wsp: {msg}", file=sys.stderr)


# -- solve -------------------------------------------------------------------


def run_algorithm(
    inst: Instance,
    algorithm: str,
    relation: str = "auto",
    early_exit: bool = True,
    budget: Optional[int] = None,
    backend: Optional[str] = None,
    warn=None,
) -> tuple[Optional[Plan], dict]:
    """Solve ``inst`` with one algorithm; returns the plan and run statistics."""
    schema = inst.schema
    stats = {"relation": "", "patterns_peak": "", "plans_generated": ""}
    if algorithm == "oracle":
        return oracle.enumerate_plans(schema, budget or oracle.ORACLE_BUDGET), stats
    if algorithm == "naive":
        return solve_naive(schema, budget=budget or NAIVE_PLAN_BUDGET), stats
    if algorithm != "pattern":
        raise UsageError(f"unknown algorithm {algorithm!r}")
    rel = resolve_relation(schema, relation)
    if relation == "auto" and isinstance(rel, IdentityRelation) and schema.constraints and warn:
        warn("constraints fit no structured relation; falling back to the identity relation (slow)")
    try:
        rep = solve_pattern(schema, rel, early_exit=early_exit, backend=backend, pattern_budget=budget or 0)
    except MemoryError as exc:
        raise ResourceLimit("out of memory while building pattern tables") from exc
    stats.update(relation=rel.name, patterns_peak=rep.patterns_peak, plans_generated=rep.plans_generated)
    return rep.result, stats


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.instance))
    plan, stats = run_algorithm(
        inst, args.algorithm, args.relation, args.early_exit, args.budget, args.kernel, warn=_err
    )
    if args.stats:
        print(" ".join(f"{k}={v}" for k, v in stats.items() if v != ""), file=sys.stderr)
    if plan is None:
        print("UNSAT")
        return EXIT_NO
    text = emit_plan(plan, inst)
    if args.output:
        _write(args.output, text)
        print("SAT")
    else:
        _write(None, text)
    return EXIT_OK


# -- verify ------------------------------------------------------------------


def explain(inst: Instance, plan: Plan) -> Optional[str]:
    """``None`` if ``plan`` is a valid complete plan, else the first problem found."""
    schema = inst.schema
    missing = [inst.task_names[t] for t in range(schema.k) if t not in plan]
    if missing:
        return f"incomplete: no assignment for {', '.join(missing)}"
    for t, u in plan.items():
        if u not in schema.authorizations[t]:
            return f"unauthorized: {inst.user_names[u]} is not authorized for {inst.task_names[t]}"
    c = first_violated(schema, plan)
    if c is not None:
        return f"violated: {inst.describe(c)}"
    return None


def cmd_verify(args) -> int:
    inst = parse_instance(_read(args.instance))
    plan = parse_plan(_read(args.plan), inst)
    problem = explain(inst, plan)
    if problem is None:
        print("VALID")
        return EXIT_OK
    print(f"INVALID {problem}")
    return EXIT_NO


# -- generate ----------------------------------------------------------------


def _config(args, k=None, n=None, seed=None) -> GeneratorConfig:
    return GeneratorConfig(
        k=args.k if k is None else k,
        n=args.n if n is None else n,
        auth_min=args.auth_min,
        auth_max=args.auth_max,
        neq=args.neq,
        at_most=args.at_most,
        at_least=args.at_least,
        seed=args.seed if seed is None else seed,
    )


def cmd_generate(args) -> int:
    try:
        schema = generate_instance(_config(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _write(args.output, emit_instance(schema))
    return EXIT_OK


# -- bench -------------------------------------------------------------------


def bench_rows(
    ks: Sequence[int],
    ns: Sequence[Optional[int]],
    seeds: Sequence[int],
    algorithms: Sequence[str],
    args,
) -> list[dict]:
    """One row per (k, n, seed, algorithm); a failing run is recorded, not raised."""
    rows = []
    for k in ks:
        for n in ns:
            for seed in seeds:
                try:
                    cfg = _config(args, k=k, n=n, seed=seed).validate()
                    inst = Instance.with_default_names(generate_instance(cfg))
                except ValueError as exc:
                    rows.extend(_row(seed, k, n or 10 * k, "", a, verdict=f"ERROR {exc}") for a in algorithms)
                    continue
                for algo in algorithms:
                    row = _row(seed, k, cfg.n, inst.schema.m, algo)
                    start = time.perf_counter()
                    try:
                        plan, stats = run_algorithm(inst, algo, args.relation, args.early_exit, args.budget, args.kernel)
                        row.update(stats, verdict="UNSAT" if plan is None else "SAT")
                    except ResourceLimit as exc:
                        row["verdict"] = "LIMIT"
                        log_failure(seed, k, algo, exc)
                    except Exception as exc:  # noqa: BLE001 - the sweep must go on
                        row["verdict"] = f"ERROR {type(exc).__name__}"
                        log_failure(seed, k, algo, exc)
                    if args.timing:
                        row["wall_time_ms"] = f"{(time.perf_counter() - start) * 1000:.3f}"
                    rows.append(row)
    return rows


def log_failure(seed, k, algo, exc) -> None:
    _err(f"bench k={k} seed={seed} {algo}: {type(exc).__name__}: {exc}")


def _row(seed, k, n, m, algorithm, verdict="") -> dict:
    return {
        "seed": seed, "k": k, "n": n, "m": m, "algorithm": algorithm, "relation": "",
        "verdict": verdict, "patterns_peak": "", "plans_generated": "", "wall_time_ms": "",
    }


def bench_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({c: r.get(c, "") for c in BENCH_COLUMNS})
    return buf.getvalue()


def cmd_bench(args) -> int:
    algorithms = [a for a in args.algorithms.split(",") if a]
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    seeds = range(args.seed, args.seed + args.repetitions)
    rows = bench_rows(args.k or [], args.n or [None], seeds, algorithms, args)
    _write(args.output, bench_csv(rows))
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------


def _generator_flags(p: argparse.ArgumentParser, *, sweep: bool) -> None:
    if sweep:
        p.add_argument("--k", type=int, nargs="*", help="task counts to sweep")
        p.add_argument("--n", type=int, nargs="*", help="user counts to sweep (default 10k)")
    else:
        p.add_argument("--k", type=int, required=True, help="number of tasks")
        p.add_argument("--n", type=int, help="number of users (default 10k)")
    p.add_argument("--auth-min", type=int, default=1)
    p.add_argument("--auth-max", type=int, help="default max(1, k // 2)")
    p.add_argument("--neq", type=int, default=20, help="number of != constraints")
    p.add_argument("--at-most", type=int, default=2, help="number of at-most-distinct constraints")
    p.add_argument("--at-least", type=int, default=2, help="number of at-least-distinct constraints")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (first seed for bench)")


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--relation", choices=RELATIONS, default="auto")
    p.add_argument("--early-exit", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--budget", type=int, help="plan, pattern or assignment budget for the chosen algorithm")
    p.add_argument("--kernel", choices=("python", "compiled"), help="pattern-table kernel (default: best available)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wsp", description="Workflow satisfiability solver.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="pattern")
    _solver_flags(p)
    p.add_argument("-o", "--output", help="write the plan here (default: stdout)")
    p.add_argument("--stats", action="store_true", help="print run statistics to stderr")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a plan against an instance")
    p.add_argument("instance")
    p.add_argument("plan")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="write a random instance")
    _generator_flags(p, sweep=False)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="generate and solve a sweep, write CSV")
    _generator_flags(p, sweep=True)
    p.add_argument("--repetitions", type=int, default=1, help="seeds per configuration")
    p.add_argument("--algorithms", default="pattern", help="comma-separated: pattern,naive,oracle")
    _solver_flags(p)
    p.add_argument("--timing", action=argparse.BooleanOptionalAction, default=True,
                   help="fill wall_time_ms (disable for byte-reproducible CSVs)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, ValidationError, UsageError, RelationMismatch, SchemaError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ResourceLimit as exc:
        _err(f"resource limit: {exc}")
        return EXIT_LIMIT
    except MemoryError:
        _err("resource limit: out of memory")
        return EXIT_LIMIT
    except WSPError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
