"""Benchmark the compiled RK4 kernels against the pure-Python twin.

Usage: python benchmarks/bench_backends.py [steps]
"""

import sys
import time

import numpy as np

from carrollkit import _rk4_py

try:
    from carrollkit import _rk4 as compiled
except ImportError:
    compiled = None

WORKLOADS = [
    (
        "em2d_ext (planar particle, linear B)",
        5,
        np.array([1.0, 0.7, 0.4, 0.9, 0.2, 0.3, 0.0]),
        np.array([0.3, -0.2, 0.1, 0.02, 0.015]),
        np.array([0.1, -0.2, 0.3, 0.4]),
    ),
    (
        "em3d_spin (precession, linear B)",
        3,
        np.array([1.0, 0.4, 0.8, 0.0, 0.0, 0.0, 0.5]),
        np.concatenate([[0.1, 0.0, -0.2], [0.0, 0.0, 1.5], 0.05 * np.eye(3).reshape(-1)]),
        np.array([0.1, 0.2, 0.3, -0.1, 0.4, 0.0, 0.0, 0.6, 0.8]),
    ),
]


def timed(mod, tag, p, fp, y0, n):
    t0 = time.perf_counter()
    out, done, _ = mod.run_flat(tag, p, fp, y0, 0.0, 1e-3, n)
    dt = time.perf_counter() - t0
    assert done == n
    return dt, out


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    print(f"fixed-step RK4, {n} steps per run\n")
    header = f"{'workload':<40} {'pure [s]':>10} {'compiled [s]':>13} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, tag, p, fp, y0 in WORKLOADS:
        t_py, out_py = timed(_rk4_py, tag, p, fp, y0, n)
        if compiled is None:
            print(f"{name:<40} {t_py:>10.3f} {'n/a':>13} {'n/a':>9}")
            continue
        t_cy, out_cy = timed(compiled, tag, p, fp, y0, n)
        diff = np.max(np.abs(out_py - out_cy))
        print(f"{name:<40} {t_py:>10.3f} {t_cy:>13.4f} {t_py / t_cy:>8.0f}x")
        print(f"{'':<40} max state difference {diff:.2e}")
    if compiled is None:
        print("\ncompiled extension unavailable; install with a C compiler to compare")


if __name__ == "__main__":
    main()
