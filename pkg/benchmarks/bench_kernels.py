#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python fallback.

Times the three hot paths (scalar evaluation, batched evaluation, adaptive
Simpson over a program) and one end-to-end falsification campaign under each
backend.  Run from the repository root after building the extension:

    python3 setup.py build_ext --inplace
    python3 benchmarks/bench_kernels.py
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from chronoscale import kernel  # noqa: E402
from chronoscale.functions import ScaleFunction  # noqa: E402
from chronoscale.search import GenConfig, run_campaign  # noqa: E402


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name: str) -> dict:
    kernel.use_backend(name)
    f = ScaleFunction.from_expression("exp(x/3)*(x^2+1) + sin(x)/(x+2)")
    tab = ScaleFunction.from_table([i / 64 for i in range(65)],
                                   [(i / 64) ** 2 for i in range(65)])
    mixed = (abs(f) ** 1.7) * (tab + 0.5)
    xs = [0.001 + 0.999 * i / 20000 for i in range(20001)]

    out = {}
    out["scalar eval x 5000"] = timeit(
        lambda: [f.evaluate(x) for x in xs[:5000]])
    out["batched eval x 20001"] = timeit(lambda: f.evaluate_many(xs))
    out["simpson(program)"] = timeit(
        lambda: kernel.simpson_program(mixed.program, 0.0, 1.0, 1e-11, 1e-11, 40))
    out["campaign qi x 60"] = timeit(
        lambda: run_campaign("qi", GenConfig(seed=7), 60), repeat=1)
    return out


def main():
    backends = kernel.available_backends()
    results = {name: bench_backend(name) for name in backends}
    kernel.use_backend(backends[0])
    keys = list(next(iter(results.values())))
    width = max(len(k) for k in keys) + 2
    header = "".join(f"{name:>14s}" for name in results)
    print(f"{'':{width}s}{header}" + ("       speedup" if len(results) == 2 else ""))
    for k in keys:
        row = f"{k:{width}s}"
        vals = [results[name][k] for name in results]
        for v in vals:
            row += f"{v * 1e3:>12.2f}ms"
        if len(vals) == 2 and vals[0] > 0:
            row += f"{vals[1] / vals[0]:>12.1f}x"
        print(row)


if __name__ == "__main__":
    main()
