"""Compare the compiled and pure-numpy window-scan backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Each case scans ``K`` sorted rows of length ``k`` with window sizes
``m..k`` (``m = ceil(5k/6)``, as for ``d = 2``) plus one query point per
row, which is the shape of one oracle round of the median loop. The two
backends are checked for agreement before timing.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from affmed import kernels
from affmed.kernels import scan_windows

CASES = [(64, 30), (128, 100), (128, 300), (32, 1000)]


def best_time(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.BACKEND != "cython":
        print("compiled kernel not built; timing the numpy backend only")
    rng = np.random.default_rng(0)
    print(f"{'K':>5} {'k':>6} {'m':>6} {'numpy ms':>10} {'cython ms':>10} {'speedup':>8}")
    for K, k in CASES:
        m = math.ceil(5 * k / 6)
        Y = np.sort(rng.standard_t(3, (K, k)), axis=1)
        p = rng.standard_normal(K)
        t_np = best_time(lambda: scan_windows(Y, m, p, 1e-9, backend="numpy"), args.repeat)
        if kernels.BACKEND == "cython":
            a = scan_windows(Y, m, p, 1e-9, backend="numpy")
            b = scan_windows(Y, m, p, 1e-9, backend="cython")
            for x, y in zip(a, b):
                np.testing.assert_allclose(x, y, rtol=1e-10, atol=1e-12)
            t_cy = best_time(lambda: scan_windows(Y, m, p, 1e-9, backend="cython"), args.repeat)
            print(f"{K:>5} {k:>6} {m:>6} {1e3 * t_np:>10.2f} {1e3 * t_cy:>10.2f} {t_np / t_cy:>7.1f}x")
        else:
            print(f"{K:>5} {k:>6} {m:>6} {1e3 * t_np:>10.2f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
