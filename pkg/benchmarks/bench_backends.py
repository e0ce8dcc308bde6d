"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_backends.py [--quick]

Imports both backend modules directly, so results do not depend on which
one the package selected at import time.
"""

import argparse
import time
from itertools import combinations

import numpy as np

from lggm._kernels import _fallback

try:
    from lggm._kernels import _core
except ImportError:
    _core = None


def _haar(n, rng):
    z = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return z / np.linalg.norm(z)


def _cuts(n, max_size):
    return [c for size in range(1, max_size + 1)
            for c in combinations(range(1, n + 1), size)]


def _time(fn, min_seconds):
    fn()  # warm up
    reps = 0
    t0 = time.perf_counter()
    while True:
        fn()
        reps += 1
        dt = time.perf_counter() - t0
        if dt > min_seconds and reps >= 3:
            return dt / reps


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="fewer repetitions, smaller cases")
    args = parser.parse_args()
    min_s = 0.05 if args.quick else 0.3

    rng = np.random.default_rng(2024)
    tg24 = np.linspace(0, np.pi, 25)
    pg24 = np.arange(24) * 2 * np.pi / 24
    tg8 = np.linspace(0, np.pi, 9)
    pg8 = np.arange(8) * 2 * np.pi / 8

    v4 = _haar(4, rng)
    v10 = _haar(10, rng)
    v14 = _haar(14, rng)
    ang1 = np.array([0.7, 1.1])
    ang2 = np.array([0.7, 1.1, 2.0, 0.3])

    cases = [
        ("collapse 10q m=1",
         lambda k: k.collapse(v10, 10, (1,), [0.7], [1.1], 0)),
        ("cut_lambda_max 10q all cuts",
         lambda k: k.cut_lambda_max(v10, 10, _cuts(10, 5))),
        ("cut_lambda_max 14q cuts<=2",
         lambda k: k.cut_lambda_max(v14, 14, _cuts(14, 2))),
        ("objective 4q m=1",
         lambda k: k.avg_ggm_objective(v4, 4, (1,), ang1, _cuts(3, 1))),
        ("objective 10q m=2 cuts<=2",
         lambda k: k.avg_ggm_objective(v10, 10, (1, 2), ang2, _cuts(8, 2))),
        ("grid_scan 4q m=1 (24 pts)",
         lambda k: k.grid_scan(v4, 4, (1,), tg24, pg24, _cuts(3, 1))),
        ("grid_scan 4q m=2 (8 pts)",
         lambda k: k.grid_scan(v4, 4, (1, 2), tg8, pg8, _cuts(2, 1))),
        ("apply_ising 14q",
         lambda k: k.apply_ising(v14, 14, 1.0, 1.0)),
        ("apply_xxz 14q",
         lambda k: k.apply_xxz(v14, 14, 1.0, 0.5, 0.3)),
    ]

    print(f"{'case':36s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for name, fn in cases:
        t_py = _time(lambda: fn(_fallback), min_s)
        if _core is None:
            print(f"{name:36s} {t_py * 1e3:10.3f} ms {'absent':>12s}")
            continue
        t_cy = _time(lambda: fn(_core), min_s)
        print(f"{name:36s} {t_py * 1e3:10.3f} ms {t_cy * 1e3:10.3f} ms "
              f"{t_py / t_cy:8.1f}x")
    if _core is None:
        print("\ncompiled core not built; only the fallback was timed")


if __name__ == "__main__":
    main()
