"""Benchmark the compiled trajectory stepper against the pure-Python fallback.

Both backends consume the same pre-drawn uniform stream and must produce
bit-identical trajectories; this script verifies that and reports timings.

Run:  python benchmarks/bench_stepper.py [--states 64] [--steps 1000000]
"""

import argparse
import time

import numpy as np

from hybridgibbs import check_reversibility, simulate
from hybridgibbs.randomgen import random_probvec, random_reversible_kernel
from hybridgibbs.simulate import COMPILED_STEPPER


def time_backend(rev, steps, backend, repeats=3):
    best = float("inf")
    traj = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        traj = simulate(rev, 0, steps, seed=12345, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, traj


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--states", type=int, default=64)
    parser.add_argument("--steps", type=int, default=1_000_000)
    args = parser.parse_args()

    w = random_probvec(7, args.states)
    K = random_reversible_kernel(8, w)
    rev = check_reversibility(K, w)

    t_py, traj_py = time_backend(rev, args.steps, "pure-python")
    rows = [("pure-python", t_py, args.steps / t_py)]
    if COMPILED_STEPPER:
        t_c, traj_c = time_backend(rev, args.steps, "compiled")
        assert np.array_equal(traj_py.states, traj_c.states), "backends diverged"
        rows.append(("compiled", t_c, args.steps / t_c))

    print(f"{args.states} states, {args.steps} steps (best of 3)")
    print(f"{'backend':<12} {'seconds':>10} {'steps/s':>14}")
    for name, secs, rate in rows:
        print(f"{name:<12} {secs:>10.4f} {rate:>14.0f}")
    if COMPILED_STEPPER:
        print(f"speedup: {t_py / t_c:.1f}x, trajectories bit-identical")
    else:
        print("compiled stepper unavailable; showing fallback only")


if __name__ == "__main__":
    main()
