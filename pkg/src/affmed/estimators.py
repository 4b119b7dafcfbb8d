"""Bucketed affine-equivariant estimator and classical baselines.

:func:`estimate_ours` averages the sample in ``k`` equal buckets and returns
the high-dimensional median of the bucket means. The baselines are the
empirical mean, the coordinate-wise (lower) median, and sampled-direction
approximations of the Tukey median and the Stahel-Donoho estimator. The two
depth baselines share one direction set: random unit vectors, coordinate
axes, the all-ones diagonal, covariance eigenvectors and point differences.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .geometry import as_points, sample_cov
from .median import MedianConfig, MedianReport, high_dim_median

ESTIMATORS = ("ours", "empirical_mean", "coord_median", "tukey", "stahel_donoho")
AFFINE_EQUIVARIANT = ("ours", "empirical_mean")


@dataclass
class EstimatorConfig:
    kind: str = "ours"
    delta: float = 0.05
    eta: float = 0.0
    C: float = 5.0
    median: MedianConfig = field(default_factory=MedianConfig)
    seed: int = 0
    max_candidates: int = 2000  # depth baselines: data points kept as candidates
    midpoints: int = 64  # depth baselines: random pairwise midpoints

    def __post_init__(self):
        if self.kind not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.kind!r}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta}")
        if self.C <= 0:
            raise ValueError("bucket constant C must be positive")


@dataclass
class EstimateResult:
    estimate: np.ndarray
    k_buckets: int = 0
    report: MedianReport | None = None
    undefined_flag: bool = False
    runtime_ms: float = 0.0
    score: float = math.nan  # certified outlyingness, depth or SD outlyingness
    flags: tuple = ()


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.runtime_ms = 1e3 * (time.perf_counter() - t0)
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ---------------------------------------------------------------------------
# bucketing


def choose_k(n: int, d: int, delta: float, eta: float, C: float = 5.0) -> int:
    """Number of buckets ``max(6 eta d n, C d ln(1/delta))``, clamped to ``[1, n]``."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    raw = max(6.0 * eta * d * n, C * d * math.log(1.0 / delta))
    return int(min(max(math.ceil(round(raw, 9)), 1), n))


def bucket_means(X, k: int, seed=0) -> np.ndarray:
    """Means of ``k`` buckets of ``floor(n/k)`` shuffled points.

    The ``n - k floor(n/k)`` points left over after shuffling are dropped.
    """
    X = as_points(X)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    perm = np.random.default_rng(seed).permutation(n)
    size = n // k
    return X[perm[: k * size]].reshape(k, size, X.shape[1]).mean(axis=1)


# ---------------------------------------------------------------------------
# estimators


@_timed
def estimate_ours(X, cfg: EstimatorConfig | None = None) -> EstimateResult:
    """High-dimensional median of bucket means."""
    X = as_points(X)
    cfg = cfg or EstimatorConfig()
    n, d = X.shape
    k = choose_k(n, d, cfg.delta, cfg.eta, cfg.C)
    flags = ("eta_above_regime",) if cfg.eta > 1.0 / (6 * d) else ()
    means = bucket_means(X, k, cfg.seed)
    rep = high_dim_median(means, cfg.median)
    return EstimateResult(rep.estimate, k, rep, score=rep.certified_outlyingness,
                          flags=flags + rep.flags)


@_timed
def estimate_empirical_mean(X, cfg: EstimatorConfig | None = None) -> EstimateResult:
    return EstimateResult(as_points(X).mean(axis=0))


def lower_median(a, axis=0):
    """Element of rank ``ceil(n/2)`` (the lower median for even ``n``)."""
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[axis]
    return np.partition(a, (n - 1) // 2, axis=axis).take((n - 1) // 2, axis=axis)


@_timed
def estimate_coord_median(X, cfg: EstimatorConfig | None = None) -> EstimateResult:
    return EstimateResult(lower_median(as_points(X), axis=0))


def tukey_depth_1d(y: float, Y) -> float:
    """``min(#{y_i >= y}, #{y_i <= y}) / n``."""
    Y = np.asarray(Y, dtype=np.float64).ravel()
    return min(int(np.sum(Y >= y)), int(np.sum(Y <= y))) / Y.size


def _directions(X, cfg: EstimatorConfig, rng) -> np.ndarray:
    n, d = X.shape
    parts = [np.eye(d), np.ones((1, d))]
    mc = cfg.median
    if mc.directions_random > 0:
        parts.append(rng.standard_normal((mc.directions_random, d)))
    if mc.directions_data and d > 1:
        parts.append(np.linalg.eigh(sample_cov(X))[1].T)
        q = min(mc.data_subsample, n)
        i = rng.choice(n, size=q)
        j = rng.choice(n, size=q)
        parts.append(X[i] - X[j])
    U = np.vstack(parts)
    nrm = np.linalg.norm(U, axis=1)
    keep = nrm > 1e-12 * max(nrm.max(), 1e-300)
    return U[keep] / nrm[keep, None]


def _candidates(X, cfg: EstimatorConfig, rng) -> np.ndarray:
    n = X.shape[0]
    pts = X if n <= cfg.max_candidates else X[np.sort(rng.choice(n, cfg.max_candidates, replace=False))]
    parts = [pts]
    if n > 1 and cfg.midpoints > 0:
        i = rng.choice(n, size=cfg.midpoints)
        j = rng.choice(n, size=cfg.midpoints)
        parts.append(0.5 * (X[i] + X[j]))
    parts.append(lower_median(X, axis=0)[None, :])
    C = np.vstack(parts)
    _, first = np.unique(C, axis=0, return_index=True)
    return C[np.sort(first)]  # first-occurrence order keeps ties deterministic


def _projections(X, Cand, U):
    P = X @ U.T  # (n, K)
    Q = Cand @ U.T  # (c, K)
    tol = 1e-12 * max(float(np.abs(P).max()), 1e-300)
    return np.sort(P, axis=0), Q, tol


def sampled_tukey_depth(X, Cand, U) -> np.ndarray:
    """Minimum over the rows of ``U`` of the 1D Tukey depth of each candidate."""
    Ps, Q, tol = _projections(X, Cand, U)
    n = X.shape[0]
    depth = np.full(Q.shape[0], np.inf)
    for k in range(U.shape[0]):
        col = Ps[:, k]
        ge = n - np.searchsorted(col, Q[:, k] - tol, side="left")
        le = np.searchsorted(col, Q[:, k] + tol, side="right")
        depth = np.minimum(depth, np.minimum(ge, le) / n)
    return depth


@_timed
def estimate_tukey(X, cfg: EstimatorConfig | None = None) -> EstimateResult:
    """Candidate of largest depth over a sampled direction set (ties: first)."""
    X = as_points(X)
    cfg = cfg or EstimatorConfig(kind="tukey")
    rng = np.random.default_rng(cfg.seed)
    U = _directions(X, cfg, rng)
    Cand = _candidates(X, cfg, rng)
    depth = sampled_tukey_depth(X, Cand, U)
    best = int(np.argmax(depth))
    return EstimateResult(Cand[best].copy(), score=float(depth[best]))


def sd_outlyingness(X, Cand, U, tol_rel: float = 1e-12) -> np.ndarray:
    """Maximum over directions of ``|<c, u> - med| / mad`` for each candidate.

    Medians are lower medians. A zero MAD gives 0 for a candidate at the
    median (within tolerance) and ``inf`` otherwise.
    """
    P = X @ U.T
    Q = Cand @ U.T
    med = lower_median(P, axis=0)
    mad = lower_median(np.abs(P - med), axis=0)
    tol = tol_rel * max(float(np.abs(P).max()), 1e-300)
    dev = np.abs(Q - med)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(mad > tol, dev / np.where(mad > tol, mad, 1.0),
                       np.where(dev <= tol, 0.0, np.inf))
    return out.max(axis=1)


@_timed
def estimate_stahel_donoho(X, cfg: EstimatorConfig | None = None) -> EstimateResult:
    """Candidate of smallest sampled Stahel-Donoho outlyingness.

    When every candidate has infinite outlyingness the estimator is
    undefined: ``undefined_flag`` is set and the estimate is all NaN.
    """
    X = as_points(X)
    cfg = cfg or EstimatorConfig(kind="stahel_donoho")
    rng = np.random.default_rng(cfg.seed)
    U = _directions(X, cfg, rng)
    Cand = _candidates(X, cfg, rng)
    out = sd_outlyingness(X, Cand, U)
    best = int(np.argmin(out))
    if not np.isfinite(out[best]):
        return EstimateResult(np.full(X.shape[1], np.nan), undefined_flag=True, score=math.inf)
    return EstimateResult(Cand[best].copy(), score=float(out[best]))


_DISPATCH = {
    "ours": estimate_ours,
    "empirical_mean": estimate_empirical_mean,
    "coord_median": estimate_coord_median,
    "tukey": estimate_tukey,
    "stahel_donoho": estimate_stahel_donoho,
}


def estimate(X, cfg: EstimatorConfig) -> EstimateResult:
    """Run the estimator named by ``cfg.kind``."""
    return _DISPATCH[cfg.kind](X, cfg)
