"""One-dimensional trimmed location and scale.

For a subset ``S`` of a sample the location is the subset mean and the scale
is the mean absolute deviation about it. The feasible interval of a sample is
the intersection of the slabs ``[mu_S - 2 sigma_S, mu_S + 2 sigma_S]`` over
every admissible subset, clipped to the sample range. Only contiguous windows
of the sorted sample are searched; :func:`brute_force_interval` enumerates
all subsets and is kept as the test oracle for that restriction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .kernels import scan_windows


def window_size(k: int, nu: float) -> int:
    """Smallest admissible subset size ``ceil((1 - nu) k)``.

    Rounded to 9 decimals first so that e.g. ``(1 - 1/3) * 3`` gives 2.
    """
    if not 0.0 <= nu < 1.0:
        raise ValueError(f"nu must lie in [0, 1), got {nu}")
    return max(1, math.ceil(round((1.0 - nu) * k, 9)))


@dataclass(frozen=True)
class TrimmedStats:
    subset: np.ndarray  # indices into the original sample
    mu: float
    sigma1: float

    @property
    def size(self) -> int:
        return int(self.subset.shape[0])


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    empty: bool = False
    flags: tuple = field(default=())

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, y: float, tol: float = 0.0) -> bool:
        return (not self.empty) and self.lo - tol <= y <= self.hi + tol


def subset_stats(Y, subset) -> TrimmedStats:
    """Mean and mean absolute deviation of ``Y`` restricted to ``subset``."""
    Y = np.asarray(Y, dtype=np.float64).ravel()
    idx = np.asarray(subset, dtype=np.intp).ravel()
    vals = Y[idx]
    if vals.size and vals.min() == vals.max():
        return TrimmedStats(idx, float(vals[0]), 0.0)
    mu = float(vals.mean())
    return TrimmedStats(idx, mu, float(np.abs(vals - mu).mean()))


def _as_sample(Y) -> np.ndarray:
    Y = np.asarray(Y, dtype=np.float64).ravel()
    if Y.size == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(Y)):
        raise ValueError("sample contains NaN or infinite values")
    return Y


def min_sigma_subset(Y, m: int) -> TrimmedStats:
    """Subset of size at least ``m`` with the smallest mean absolute deviation.

    Ties go to the smaller size, then the leftmost window in sorted order.
    """
    Y = _as_sample(Y)
    k = Y.size
    if not 1 <= m <= k:
        raise ValueError(f"m must lie in [1, {k}], got {m}")
    order = np.argsort(Y, kind="stable")
    scan = scan_windows(Y[order][None, :], m)
    a, s = scan.ms_window[0]
    return subset_stats(Y, order[a:a + s])


def slab_interval(stats: TrimmedStats) -> Interval:
    return Interval(stats.mu - 2.0 * stats.sigma1, stats.mu + 2.0 * stats.sigma1)


def _finish(lo: float, hi: float) -> Interval:
    if lo > hi + TOL.tie * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        return Interval(mid, mid, empty=False, flags=("near_empty",))
    if lo > hi:
        lo = hi = 0.5 * (lo + hi)
    return Interval(float(lo), float(hi))


def directional_feasible_interval(Y, nu: float) -> Interval:
    """Intersection of all window slabs of sizes ``m..k``, clipped to the range.

    When rounding makes the intersection empty the midpoint of the two
    crossing bounds is returned and the ``near_empty`` flag is set.
    """
    Y = _as_sample(Y)
    m = window_size(Y.size, nu)
    scan = scan_windows(np.sort(Y)[None, :], m)
    return _finish(scan.lo[0], scan.hi[0])


def brute_force_interval(Y, nu: float, max_k: int = 20) -> Interval:
    """Exact intersection over every subset of size at least ``m``.

    Exponential in ``k``; a test oracle only.
    """
    Y = _as_sample(Y)
    k = Y.size
    if k > max_k:
        raise ValueError(f"brute force limited to k <= {max_k}, got {k}")
    m = window_size(k, nu)
    lo, hi = -math.inf, math.inf
    for size in range(m, k + 1):
        for S in itertools.combinations(range(k), size):
            st = subset_stats(Y, S)
            lo = max(lo, st.mu - 2.0 * st.sigma1)
            hi = min(hi, st.mu + 2.0 * st.sigma1)
    return _finish(max(lo, Y.min()), min(hi, Y.max()))


def outlyingness_1d(y: float, Y, nu: float) -> float:
    """``|y - mu| / sigma`` for the minimum-scale subset of ``Y``.

    A zero scale gives 0 at the location and ``inf`` elsewhere.
    """
    Y = _as_sample(Y)
    st = min_sigma_subset(Y, window_size(Y.size, nu))
    dev = abs(y - st.mu)
    if st.sigma1 == 0.0:
        return 0.0 if dev <= TOL.tie * max(1.0, abs(st.mu)) else math.inf
    return dev / st.sigma1
