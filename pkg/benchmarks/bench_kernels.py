#!/usr/bin/env python3
"""Benchmark the grid supremum kernels: numba build vs pure numpy.

Runs the three hot kernels on realistic workload shapes (an x-grid
conjugate supremum, a W-grid supremum with a query batch, and a DC grid
minimum) and prints a timing table.  Both builds are imported directly, so
the ECONV_BACKEND selection does not matter here; results are asserted
equal before timing.

Usage: python benchmarks/bench_kernels.py [--nodes 2000000] [--queries 64]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from econv import _kernels


def _time(fn, *args, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def build_workloads(n_nodes: int, n_queries: int, seed: int = 7):
    rng = np.random.default_rng(seed)
    pts = np.ascontiguousarray(rng.uniform(-5, 5, size=(n_nodes, 1)))
    fvals = pts[:, 0] ** 2
    fvals[rng.random(n_nodes) < 0.05] = np.inf  # sprinkle off-domain nodes

    m = max(1, n_nodes // 4)
    xs = np.ascontiguousarray(rng.uniform(-5, 5, size=(m, 1)))
    us = np.ascontiguousarray(rng.uniform(-5, 0, size=(m, 1)))
    alphas = rng.uniform(0.5, 5, size=m)
    gvals = xs[:, 0] ** 2 / 4.0
    gvals[rng.random(m) < 0.3] = np.inf
    queries = np.ascontiguousarray(rng.uniform(0.1, 3, size=(n_queries, 1)))

    gv2 = rng.uniform(-1, 1, size=n_nodes)
    gv2[rng.random(n_nodes) < 0.2] = np.inf
    return {
        "coupling_sup": (pts, fvals, np.array([3.0]), np.array([-1.0]), 0.0, 0.0),
        "wgrid_sup_many": (xs, us, alphas, gvals, queries, 0.0),
        "dc_grid_min": (fvals, gv2),
    }


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=2_000_000)
    ap.add_argument("--queries", type=int, default=64)
    args = ap.parse_args()

    work = build_workloads(args.nodes, args.queries)
    numba_kernels = _kernels.NUMBA_KERNELS
    if numba_kernels is None:
        try:
            numba_kernels = _kernels._build_numba()
        except ImportError:
            numba_kernels = None

    print(f"nodes={args.nodes}, queries={args.queries}")
    print(f"{'kernel':<18} {'numpy [s]':>12} {'numba [s]':>12} {'speedup':>9}")
    for name, arglist in work.items():
        np_fn = _kernels.NUMPY_KERNELS[name]
        t_np = _time(np_fn, *arglist)
        if numba_kernels is None:
            print(f"{name:<18} {t_np:>12.4f} {'n/a':>12} {'n/a':>9}")
            continue
        nb_fn = numba_kernels[name]
        nb_fn(*arglist)  # absorb JIT compilation before timing
        r_np = np.asarray(np_fn(*arglist), dtype=float).ravel()
        r_nb = np.asarray(nb_fn(*arglist), dtype=float).ravel()
        if name == "wgrid_sup_many":
            assert np.allclose(r_np, r_nb, atol=1e-12), name
        else:
            assert r_np[0] == r_nb[0], name  # argmax index may differ on ties
        t_nb = _time(nb_fn, *arglist)
        print(f"{name:<18} {t_np:>12.4f} {t_nb:>12.4f} {t_np / t_nb:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
