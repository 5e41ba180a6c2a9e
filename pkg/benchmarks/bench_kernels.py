"""Compare the compiled and pure-Python pattern kernels on identical instances.

Each generated instance is solved by both kernels; the verdict, plan and
table counters must match exactly, and the per-kernel wall time (best of
``--repeat``) is reported with the speedup.

    python benchmarks/bench_kernels.py --k 6 8 10 --seeds 3
"""

import argparse
import sys
import time

from wspsolve import GeneratorConfig, generate_instance, solve_pattern
from wspsolve.kernel import available_backends


def timed(schema, backend, relation, early_exit, repeat):
    best, rep = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        rep = solve_pattern(schema, relation, early_exit=early_exit, backend=backend)
        best = min(best, time.perf_counter() - start)
    return rep, best


def signature(rep):
    plan = None if rep.result is None else tuple(sorted(rep.result.items()))
    return rep.satisfiable, plan, rep.patterns_peak, rep.plans_generated


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k", type=int, nargs="+", default=[6, 8, 10])
    ap.add_argument("--users-per-task", type=int, default=4)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--relation", default="ui")
    ap.add_argument("--early-exit", action=argparse.BooleanOptionalAction, default=False)
    ap.add_argument("--repeat", type=int, default=1)
    args = ap.parse_args(argv)

    if "compiled" not in available_backends():
        print("compiled kernel not built; run: python setup.py build_ext --inplace", file=sys.stderr)
        return 2

    print(f"{'k':>3} {'n':>4} {'seed':>4} {'verdict':>7} {'peak':>9} {'generated':>10} "
          f"{'python_ms':>10} {'compiled_ms':>11} {'speedup':>8}")
    mismatches = 0
    for k in args.k:
        n = args.users_per_task * k
        for seed in range(args.seeds):
            cfg = GeneratorConfig(k=k, n=n, neq=2 * k, at_most=1, at_least=1, seed=seed)
            schema = generate_instance(cfg)
            py, t_py = timed(schema, "python", args.relation, args.early_exit, args.repeat)
            cc, t_cc = timed(schema, "compiled", args.relation, args.early_exit, args.repeat)
            same = signature(py) == signature(cc)
            mismatches += not same
            print(f"{k:>3} {n:>4} {seed:>4} {('SAT' if cc.satisfiable else 'UNSAT'):>7} {cc.patterns_peak:>9} "
                  f"{cc.plans_generated:>10} {t_py * 1e3:>10.1f} {t_cc * 1e3:>11.1f} {t_py / t_cc:>7.1f}x"
                  + ("" if same else "  MISMATCH"))
    print(f"parity: {'ok' if mismatches == 0 else f'{mismatches} mismatches'}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
