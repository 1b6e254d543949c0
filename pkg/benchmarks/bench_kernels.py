#!/usr/bin/env python3
"""Benchmark the pair-scatter inner loop: compiled extension vs numpy
fallback, plus the full right-hand-side assembly under each.

Usage:
    python3 benchmarks/bench_kernels.py [--cells 100,300,600] [--repeats 50]
"""

import argparse
import time

import numpy as np

from gcfpbe import backend
from gcfpbe import (ConstantRate, CoefficientSet, DaughterDistribution,
                    FragmentationRate, ProductKernel, StateVector, build_grid,
                    build_pair_allocation, build_tables)
from gcfpbe.operators import total_rhs


def time_call(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_scatter(n_cells, repeats):
    grid = build_grid(100.0, n_cells, "geometric")
    alloc = build_pair_allocation(grid)
    x = grid.pivots
    kernel = ProductKernel(0.5)
    kp = np.asarray(kernel(x[alloc.ii], x[alloc.jj]), dtype=float)
    xi = np.random.default_rng(0).uniform(0.0, 1.0, n_cells)
    args = (kp, alloc.pair_dd, alloc.wlo_dk, alloc.whi_dk, alloc.klo,
            alloc.khi, alloc.mass_w, alloc.ii, alloc.jj, xi, n_cells)
    out = {}
    for name in backend.available_backends():
        impl = backend.get_impl(name)
        out[name] = time_call(lambda: impl.coag_pair_scatter(*args), repeats)
    return alloc.n_pairs, out


def bench_rhs(n_cells, repeats):
    grid = build_grid(100.0, n_cells, "geometric")
    coeffs = CoefficientSet(ProductKernel(0.5), FragmentationRate(1.0, 1.0),
                            DaughterDistribution(0.0), ConstantRate(0.0),
                            ConstantRate(0.1), ConstantRate(0.1))
    tables = build_tables(grid, coeffs)
    e = grid.edges
    xi = (np.exp(-e[:-1]) - np.exp(-e[1:])) / grid.widths
    state = StateVector(0.0, xi, grid)
    out = {}
    saved = backend._impl
    try:
        for name in backend.available_backends():
            backend._impl = backend.get_impl(name)
            out[name] = time_call(lambda: total_rhs(state, tables), repeats)
    finally:
        backend._impl = saved
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cells", default="100,300,600")
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()
    cells = [int(c) for c in args.cells.split(",")]

    print(f"available backends: {', '.join(backend.available_backends())}")
    print(f"{'cells':>6} {'pairs':>9} | scatter "
          + " ".join(f"{n:>12}" for n in backend.available_backends())
          + " | rhs " + " ".join(f"{n:>12}" for n in backend.available_backends()))
    for n in cells:
        n_pairs, scat = bench_scatter(n, args.repeats)
        rhs = bench_rhs(n, max(5, args.repeats // 5))
        scat_cols = " ".join(f"{scat[k] * 1e6:>10.1f}us" for k in backend.available_backends())
        rhs_cols = " ".join(f"{rhs[k] * 1e6:>10.1f}us" for k in backend.available_backends())
        print(f"{n:>6} {n_pairs:>9} |         {scat_cols} |     {rhs_cols}")
    if "compiled" in backend.available_backends():
        n_pairs, scat = bench_scatter(cells[-1], args.repeats)
        speedup = scat["numpy"] / scat["compiled"]
        print(f"\nscatter speedup at {cells[-1]} cells: {speedup:.1f}x")


if __name__ == "__main__":
    main()
