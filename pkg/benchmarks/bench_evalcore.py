"""Benchmark: compiled evaluation kernel vs pure-Python fallback.

Compiles the nonlinear constraints of a representative cut subproblem
(8-cycle, residue 3, essential budget 4: spectral smoothness guards
plus four outer cuts) and times both kernels on the same programs and
the same pseudorandom assignments.

Run:  python3 benchmarks/bench_evalcore.py [repeats]
"""

from __future__ import annotations

import random
import sys
import time

from corecuts import evalcore, evalcore_py
from corecuts.evalcore import compile_expr
from corecuts.perms import Cycle
from corecuts.synth import s1_for_point, smoothness
from corecuts.corepoints import projected_essential_set


def build_programs():
    k = 8
    cyc = Cycle(tuple(range(1, k + 1)))
    constraints = list(smoothness(cyc).constraints)
    for z in projected_essential_set(k, 3, 4).points:
        constraints.extend(s1_for_point(z, cyc).constraints)
    var_index = {f"x{i}": i - 1 for i in range(1, k + 1)}
    programs = [compile_expr(c.expr, var_index) for c in constraints]
    return programs, k


def time_backend(run, programs, assignments) -> float:
    t0 = time.perf_counter()
    sink = 0.0
    for values in assignments:
        for prog in programs:
            ok, val = run(prog.code, prog.consts, values, prog.stack)
            if ok:
                sink += val
    elapsed = time.perf_counter() - t0
    # keep the sink live so the loop cannot be optimized away
    if sink == float("inf"):
        print(sink)
    return elapsed


def main() -> None:
    repeats = int(sys.argv[1]) if len(sys.argv) > 1 else 20_000
    programs, k = build_programs()
    rng = random.Random(20240511)
    from array import array

    assignments = [
        array("d", (float(rng.randint(-6, 6)) for _ in range(k)))
        for _ in range(repeats)
    ]

    total_evals = repeats * len(programs)
    # correctness parity first: both kernels must agree bit-for-bit
    for values in assignments[:200]:
        for prog in programs:
            a = evalcore_py.run_program(prog.code, prog.consts, values, prog.stack)
            b = evalcore._run(prog.code, prog.consts, values, prog.stack)
            assert a == b, (a, b)

    t_py = time_backend(evalcore_py.run_program, programs, assignments)
    t_active = time_backend(evalcore._run, programs, assignments)

    print(f"programs: {len(programs)} (8-cycle residue-3 cut subproblem)")
    print(f"evaluations per backend: {total_evals}")
    print(f"pure python : {t_py:8.3f} s  ({total_evals / t_py:10.0f} evals/s)")
    name = evalcore.backend_name()
    print(f"{name:12s}: {t_active:8.3f} s  ({total_evals / t_active:10.0f} evals/s)")
    if name == "compiled":
        print(f"speedup: {t_py / t_active:.1f}x")
    else:
        print("compiled kernel unavailable; both timings use the fallback")


if __name__ == "__main__":
    main()
