"""Benchmark the kernel-matrix assembly: numba hot path vs numpy fallback.

The O(M^2) assembly of the Green-kernel Nystrom matrices dominates solve
time; this script times both backends over a range of grid sizes.

    python3 benchmarks/bench_assembly.py [--sizes 250 500 1000 2000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from nsk import ModelParams, kernel_params
from nsk.grid import RadialGrid
from nsk.operators import assemble_operators, backend_name


def time_backend(grid, kp, kappa, backend, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        assemble_operators(grid, kp, kappa, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    params = ModelParams(n=3, gamma=1.0, kappa=0.01, mu=1.0, rho_plus=1.0, rho_b=-1.0, u_minus=0.0)
    kp = kernel_params(params)

    if backend_name() != "numba":
        print("numba unavailable/disabled (NSK_NUMBA): timing the numpy path only")
    print(f"{'M':>6} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for m in args.sizes:
        grid = RadialGrid.from_nodes(np.linspace(1.0, 21.0, m), params.n)
        t_np = time_backend(grid, kp, params.kappa, "numpy", args.repeats)
        if backend_name() == "numba":
            assemble_operators(grid, kp, params.kappa, backend="numba")  # warm the JIT
            t_nb = time_backend(grid, kp, params.kappa, "numba", args.repeats)
            print(f"{m:>6} {t_np * 1e3:>12.2f} {t_nb * 1e3:>12.2f} {t_np / t_nb:>7.1f}x")
        else:
            print(f"{m:>6} {t_np * 1e3:>12.2f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
