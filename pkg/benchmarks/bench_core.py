"""Benchmark the compiled trajectory stepper against the pure-Python twin.

Usage:
    python3 benchmarks/bench_core.py [--t 200000] [--repeat 3]

Both backends consume the same pregenerated uniform draws, so the outputs
are bit-identical; only the wall time differs.
"""

import argparse
import time

import numpy as np

from cusketch import _reference
from cusketch._backend import BACKEND

try:
    from cusketch import _speedups
except ImportError:
    _speedups = None


CASES = [
    ("cu m=50 d=4", 50, 4, _reference.VARIANT_CU, 0),
    ("cu m=10 d=9", 10, 9, _reference.VARIANT_CU, 0),
    ("ub m=50 d=4 g=3", 50, 4, _reference.VARIANT_UB, 3),
    ("lb m=20 d=3 g=2", 20, 3, _reference.VARIANT_LB, 2),
]


def time_backend(run_steps, m, d, variant, g, u, repeat):
    best = float("inf")
    for _ in range(repeat):
        values = [0] * m
        t0 = time.perf_counter()
        run_steps(values, d, variant, g, u)
        best = min(best, time.perf_counter() - t0)
    return best, values


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--t", type=int, default=200_000, help="steps per trajectory")
    parser.add_argument("--repeat", type=int, default=3, help="repeats, best-of")
    args = parser.parse_args()

    print(f"active backend: {BACKEND}; T={args.t}, best of {args.repeat}")
    header = f"{'case':<20} {'python s':>10} {'compiled s':>11} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, m, d, variant, g, seed in [(c[0], c[1], c[2], c[3], c[4], i)
                                         for i, c in enumerate(CASES)]:
        rng = np.random.Generator(np.random.PCG64(seed))
        u = rng.random((args.t, d))
        t_py, v_py = time_backend(_reference.run_steps, m, d, variant, g, u, args.repeat)
        if _speedups is None:
            print(f"{name:<20} {t_py:>10.3f} {'n/a':>11} {'n/a':>8}")
            continue
        t_cy, v_cy = time_backend(_speedups.run_steps, m, d, variant, g, u, args.repeat)
        assert v_py == list(v_cy), "backends disagree"
        print(f"{name:<20} {t_py:>10.3f} {t_cy:>11.3f} {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
