#!/usr/bin/env python3
"""Benchmark the numba-compiled kernels against the pure-NumPy fallback.

Runs the same workloads in two subprocesses (the backend is chosen at import
time via EIGENPATH_NUMBA) and prints a comparison table:

    python3 benchmarks/bench_backends.py [--quick]

Workloads: the path-following loop (one deterministic-start solve and one
random-start solve), the reference eigensolver, and a condition-length
quadrature pass.
"""

import argparse
import json
import os
import subprocess
import sys
from pathlib import Path

PKG_SRC = Path(__file__).resolve().parent.parent / "src"

WORKER = r"""
import json, sys, time
import numpy as np
import eigenpath as ep
from eigenpath.rng import RngStream

quick = bool(int(sys.argv[1]))
n_solve = 6 if quick else 8
trials = 2 if quick else 4

results = {"backend": ep.backend_name()}

# warm-up (JIT compilation on the numba backend)
A = ep.sample_gaussian_matrix(RngStream(1, 0), n_solve, n_solve)
ep.solve_one(A)
ep.solve_random(A, RngStream(1, 1))
ep.reference_eigenpairs(A)

t0 = time.perf_counter()
steps = 0
for t in range(trials):
    rng = RngStream(77, t)
    A = ep.sample_gaussian_matrix(rng, n_solve, n_solve)
    steps += ep.solve_one(A).steps
results["solve_one_s"] = (time.perf_counter() - t0) / trials
results["solve_one_steps"] = steps / trials

t0 = time.perf_counter()
steps = 0
for t in range(trials):
    rng = RngStream(78, t)
    A = ep.sample_gaussian_matrix(rng, n_solve, n_solve)
    steps += ep.solve_random(A, rng).steps
results["solve_random_s"] = (time.perf_counter() - t0) / trials
results["solve_random_steps"] = steps / trials

t0 = time.perf_counter()
for t in range(20):
    A = ep.sample_gaussian_matrix(RngStream(79, t), 8, 8)
    ep.reference_eigenpairs(A)
results["oracle_s"] = (time.perf_counter() - t0) / 20

A = ep.sample_gaussian_matrix(RngStream(80, 0), 5, 5)
start = ep.single_start(5)
t0 = time.perf_counter()
ep.step_count_ceiling(A, start.matrix, start.eigenvalue, start.eigenvector, 500 if quick else 2000)
results["quadrature_s"] = time.perf_counter() - t0

print(json.dumps(results))
"""


def run_backend(numba_flag: str, quick: bool) -> dict:
    env = dict(os.environ)
    env["EIGENPATH_NUMBA"] = numba_flag
    env["PYTHONPATH"] = str(PKG_SRC) + os.pathsep + env.get("PYTHONPATH", "")
    out = subprocess.run(
        [sys.executable, "-c", WORKER, "1" if quick else "0"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes/trial counts")
    args = parser.parse_args()

    print("running numba backend ...")
    fast = run_backend("1", args.quick)
    print("running numpy fallback ...")
    slow = run_backend("0", args.quick)

    keys = ["solve_one_s", "solve_random_s", "oracle_s", "quadrature_s"]
    width = max(len(k) for k in keys)
    print(f"\n{'workload':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for k in keys:
        ratio = slow[k] / fast[k] if fast[k] > 0 else float("inf")
        print(f"{k:<{width}}  {fast[k]:>9.3f}s  {slow[k]:>9.3f}s  {ratio:>7.1f}x")
    print(
        f"\n(path steps per solve: one={fast['solve_one_steps']:.0f}, "
        f"random={fast['solve_random_steps']:.0f})"
    )


if __name__ == "__main__":
    main()
