#!/usr/bin/env python3
"""Measure interactive constrained-KPCA latency across dataset sizes.

For each n the script builds random fingerprints, centers the kernel,
then times: solver-state construction, the first anchored full solve
(factorization + solve), and a sequence of drag updates (right-hand-side
refresh against the cached factorization). The interactivity targets are
a sub-second full solve and a sub-50 ms median move at n=500.

    python3 scripts/benchmark_interactive.py --sizes 100 200 500 --moves 100
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from moleda.embed import (
    ConstraintSet,
    KernelSpec,
    build_kernel,
    center,
    ckpca_move_control,
    ckpca_solve,
    ckpca_state,
)


def benchmark(n: int, bits: int, density: float, kernel_kind: str,
              moves: int, seed: int) -> dict:
    rng = np.random.RandomState(seed)
    vectors = (rng.random(size=(n, bits)) < density).astype(float)
    kernel = center(build_kernel(vectors, KernelSpec(kind=kernel_kind)))

    tick = time.perf_counter()
    state = ckpca_state(kernel)
    state_s = time.perf_counter() - tick

    base = ckpca_solve(state)
    anchor = (0, float(base.coords[0, 0]), float(base.coords[0, 1]))
    tick = time.perf_counter()
    ckpca_solve(state, ConstraintSet(control_points=(anchor,)))
    full_s = time.perf_counter() - tick

    durations = []
    for _ in range(moves):
        x, y = rng.uniform(-1.0, 1.0, size=2)
        tick = time.perf_counter()
        ckpca_move_control(state, 0, float(x), float(y))
        durations.append(time.perf_counter() - tick)
    durations = np.array(durations)
    return {
        "n": n,
        "state_ms": state_s * 1e3,
        "full_solve_ms": full_s * 1e3,
        "move_median_ms": float(np.median(durations)) * 1e3,
        "move_p95_ms": float(np.percentile(durations, 95)) * 1e3,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[100, 200, 500])
    parser.add_argument("--bits", type=int, default=2048)
    parser.add_argument("--density", type=float, default=0.05)
    parser.add_argument("--kernel", default="rbf",
                        choices=("linear", "rbf", "tanimoto"))
    parser.add_argument("--moves", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    header = (f"{'n':>6}  {'state ms':>9}  {'full solve ms':>14}  "
              f"{'move med ms':>12}  {'move p95 ms':>12}")
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        row = benchmark(n, args.bits, args.density, args.kernel,
                        args.moves, args.seed)
        print(f"{row['n']:>6}  {row['state_ms']:>9.1f}  "
              f"{row['full_solve_ms']:>14.1f}  "
              f"{row['move_median_ms']:>12.3f}  "
              f"{row['move_p95_ms']:>12.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
