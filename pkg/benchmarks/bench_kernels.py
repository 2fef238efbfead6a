"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py
"""
import timeit

import numpy as np

from helmcauchy import _kernels_py

try:
    from helmcauchy import _kernels
except ImportError:
    _kernels = None


def cases(rng):
    lam = rng.uniform(-5, 200, 3000)
    t = rng.uniform(-0.5, 0.5, 3000)
    fvals = rng.normal(size=(3000, 5)) + 1j * rng.normal(size=(3000, 5))
    s = np.linspace(0.05, 0.5, 5)
    w = np.full(5, 0.09)
    z = np.linspace(0, np.pi / np.sqrt(3), 51)
    r = rng.normal(size=(2800, 51))
    lam0 = rng.uniform(0, 130, 2800)
    return {
        "shc (3000 points)": lambda m: m.shc(t, lam),
        "chc (3000 points)": lambda m: m.chc(t, lam),
        "shc_weighted_sum (3000 x 5)": lambda m: m.shc_weighted_sum(lam, fvals, s, w, 0.05),
        "volterra_march (2800 modes, M=50)": lambda m: m.volterra_march(lam0, r, z, 5.0),
    }


def main():
    rng = np.random.default_rng(0)
    print(f"{'kernel':38s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases(rng).items():
        n = 3 if "volterra" in name else 50
        tp = min(timeit.repeat(lambda: fn(_kernels_py), number=n, repeat=3)) / n * 1e3
        if _kernels is None:
            print(f"{name:38s} {tp:11.3f} {'n/a':>12s}")
            continue
        tc = min(timeit.repeat(lambda: fn(_kernels), number=n, repeat=3)) / n * 1e3
        diff = np.max(np.abs(fn(_kernels) - fn(_kernels_py)))
        print(f"{name:38s} {tp:11.3f} {tc:12.3f} {tp / tc:7.1f}x   max|diff|={diff:.1e}")


if __name__ == "__main__":
    main()
