"""High-dimensional median with certified trimmed outlyingness.

For a direction ``v`` and a subset ``S`` of the projected sample, the slab
``{x : |<x, v> - mu_S| <= 2 sigma_S}`` uses the subset mean and mean absolute
deviation. The median is a point of the convex hull that lies (up to a small
relative slack) in the slab of every direction and every subset holding at
least a ``1 - nu`` fraction of the points.

The full intersection is not computable, so :func:`high_dim_median` runs a
cutting-plane loop. It keeps a pool of slabs, finds the hull point that
minimises the worst slab ratio (a linear program over barycentric weights),
and searches for directions whose slabs exclude that point. It stops when no
candidate direction is violated by more than ``slack_eps``. In whitened mode
every step is expressed in an affine-invariant frame of the data, so the
procedure commutes with nonsingular affine maps.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import highspy
from scipy import sparse

from .config import TOL
from .errors import DimensionMismatch, InfeasibleDegenerate
from .geometry import as_points, unit, whiten
from .kernels import scan_windows
from .trimmed import directional_feasible_interval, subset_stats, window_size

log = logging.getLogger(__name__)

AUDIT_KEEP = 8
W_RIDGE = 1e-8
QP_ITERATION_LIMIT = 20000


@dataclass
class MedianConfig:
    nu: float | None = None  # None -> 1 / (3 d)
    slack_eps: float = 0.05
    max_iterations: int = 200
    directions_random: int = 64
    directions_data: bool = True
    seed: int = 0
    equivariant_mode: str = "whitened"  # or "raw"
    data_subsample: int = 16
    cuts_per_round: int = 4
    ascent_steps: int = 20
    ascent_step: float = 0.2
    grid_2d: int = 360

    def __post_init__(self):
        if self.nu is not None and not 0.0 < self.nu < 1.0:
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")
        if self.slack_eps < 0:
            raise ValueError("slack_eps must be nonnegative")
        if self.equivariant_mode not in ("whitened", "raw"):
            raise ValueError(f"unknown equivariant_mode {self.equivariant_mode!r}")

    def resolve_nu(self, d: int) -> float:
        return 1.0 / (3.0 * d) if self.nu is None else self.nu


@dataclass(frozen=True)
class SlabConstraint:
    """``|<x, v> - center| <= halfwidth`` with the subset that produced it."""

    v: np.ndarray
    center: float
    halfwidth: float
    subset: np.ndarray
    kind: str = ""
    tol: float = 0.0  # halfwidth <= tol means an equality within tol

    def outlyingness(self, x) -> float:
        """``|<x, v> - center| / sigma`` with ``sigma = halfwidth / 2``."""
        dev = abs(float(np.dot(x, self.v)) - self.center)
        if self.halfwidth > self.tol:
            return 2.0 * dev / self.halfwidth
        return 0.0 if dev <= self.tol else math.inf

    @classmethod
    def from_subset(cls, X, v, subset, kind: str = "") -> "SlabConstraint":
        proj = X @ v
        st = subset_stats(proj, subset)
        tol = TOL.eq * max(float(np.abs(proj).max()), np.finfo(float).tiny)
        return cls(v, st.mu, 2.0 * st.sigma1, st.subset, kind, tol)


@dataclass
class MedianReport:
    estimate: np.ndarray
    certified_outlyingness: float
    iterations: int
    constraints_used: int
    hull_weights: np.ndarray
    diagnostics: dict = field(default_factory=dict)
    constraints: list = field(default_factory=list)  # pool followed by final-sweep slabs

    @property
    def flags(self) -> tuple:
        return tuple(self.diagnostics.get("flags", ()))


# ---------------------------------------------------------------------------
# linear program


def _solve_pool(Zu, V, centers, halfwidths, tols, anchor=None):
    """Hull point minimising the worst slab ratio ``|<x, v_j> - c_j| / h_j``.

    Variables are simplex weights ``w`` over the rows of ``Zu``, the point
    ``x = Zu^T w`` and the ratio bound ``t``. Zero-width slabs become
    two-sided equalities within ``tols``. The min-max optimum is often a
    face rather than a point, so a second solve picks the point of that face
    closest to ``anchor`` (a strictly convex tie-break that makes the result
    a function of the pool alone). Returns ``(w, x, t, gap)``.
    """
    n, r = Zu.shape
    J = V.shape[0]
    deg = halfwidths <= tols
    hw = np.where(deg, 0.0, halfwidths)
    xcol = n + np.arange(r)
    tcol = n + r
    inf = highspy.kHighsInf

    # slab rows: v.x - h t <= c  and  v.x + h t >= c
    # degenerate: |v.x - c| <= tol/2, so the solver's own tolerance cannot push x past tol
    nd = int(deg.sum())
    nrow = 2 * J - nd + r + 1
    A = np.zeros((nrow, n + r + 1))
    lo = np.empty(nrow)
    up = np.empty(nrow)
    ri = 0
    for j in range(J):
        if deg[j]:
            A[ri, n:n + r] = V[j]
            lo[ri], up[ri] = centers[j] - 0.5 * tols[j], centers[j] + 0.5 * tols[j]
            ri += 1
        else:
            A[ri, n:n + r] = V[j]
            A[ri, tcol] = -hw[j]
            A[ri + 1, n:n + r] = V[j]
            A[ri + 1, tcol] = hw[j]
            lo[ri], up[ri] = -inf, centers[j]
            lo[ri + 1], up[ri + 1] = centers[j], inf
            ri += 2
    # x - Zu^T w = 0 and sum(w) = 1
    A[ri:ri + r, :n] = -Zu.T
    A[ri:ri + r, n:n + r] = np.eye(r)
    lo[ri:ri + r] = up[ri:ri + r] = 0.0
    A[-1, :n] = 1.0
    lo[-1] = up[-1] = 1.0
    A = sparse.csc_matrix(A)
    A.sort_indices()

    lp = highspy.HighsLp()
    lp.num_col_ = n + r + 1
    lp.num_row_ = A.shape[0]
    cost = np.zeros(n + r + 1)
    cost[tcol] = 1.0
    lp.col_cost_ = cost
    lp.col_lower_ = np.concatenate([np.zeros(n), np.full(r, -inf), [0.0]])
    lp.col_upper_ = np.full(n + r + 1, inf)
    lp.row_lower_ = lo
    lp.row_upper_ = up
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = A.indptr.astype(np.int32)
    lp.a_matrix_.index_ = A.indices.astype(np.int32)
    lp.a_matrix_.value_ = A.data.astype(np.float64)

    h = highspy.Highs()
    h.silent()
    if nd:
        feas = float(np.clip(0.1 * tols[deg].min(), 1e-12, 1e-7))
        h.setOptionValue("primal_feasibility_tolerance", feas)
    h.passModel(lp)
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kInfeasible:
        raise InfeasibleDegenerate("zero-width slabs admit no common hull point")
    if status != highspy.HighsModelStatus.kOptimal:
        raise RuntimeError(f"linear program failed: {h.modelStatusToString(status)}")
    sol = np.asarray(h.getSolution().col_value)
    gap = float(h.getInfo().primal_dual_objective_error)
    t_star = float(sol[tcol])

    if anchor is not None and r > 0:
        h.changeColBounds(tcol, 0.0, t_star + 1e-7 * (1.0 + t_star))
        h.changeColsCost(r + 1, np.append(xcol, tcol).astype(np.int32),
                         np.append(-np.asarray(anchor, dtype=np.float64), 0.0))
        # tiny ridge on w keeps the Hessian nonsingular; the solve is capped
        diag = np.concatenate([np.full(n, W_RIDGE), np.ones(r), [W_RIDGE]])
        idx = np.arange(n + r + 1, dtype=np.int32)
        h.passHessian(n + r + 1, n + r + 1, highspy.HessianFormat.kTriangular,
                      np.arange(n + r + 2, dtype=np.int32), idx, diag)
        h.setOptionValue("qp_iteration_limit", QP_ITERATION_LIMIT)
        h.run()
        if h.getModelStatus() == highspy.HighsModelStatus.kOptimal:
            sol = np.asarray(h.getSolution().col_value)
        else:
            log.debug("tie-break solve failed: %s", h.modelStatusToString(h.getModelStatus()))

    w = np.clip(sol[:n], 0.0, None)
    w /= w.sum()
    x = w @ Zu
    dev = np.abs(V @ x - centers)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(deg, 0.0, dev / np.where(deg, 1.0, halfwidths))
    t = float(ratios.max()) if J else 0.0
    return w, x, t, gap


def _unique_rows(Z):
    # first-occurrence order so that coupled inputs give identically ordered programs
    _, first, inverse = np.unique(Z, axis=0, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return first[order], rank[inverse.ravel()]


def _expand_weights(w_unique, inverse, n):
    counts = np.bincount(inverse, minlength=w_unique.size)
    return w_unique[inverse] / counts[inverse]


def solve_minmax(X, pool):
    """Hull point minimising the worst slab ratio over ``pool``.

    Returns ``(x, t, weights)`` with ``x = weights @ X``.
    """
    X = as_points(X)
    if not pool:
        raise ValueError("constraint pool is empty")
    firsts, inverse = _unique_rows(X)
    V = np.array([s.v for s in pool])
    if V.shape[1] != X.shape[1]:
        raise DimensionMismatch("slab directions do not match the point dimension")
    centers = np.array([s.center for s in pool])
    hws = np.array([s.halfwidth for s in pool])
    tols = np.array([s.tol for s in pool])
    Xu = X[firsts]
    wu, _, t, _ = _solve_pool(Xu, V, centers, hws, tols, anchor=X.mean(axis=0))
    w = _expand_weights(wu, inverse, X.shape[0])
    return w @ X, t, w


# ---------------------------------------------------------------------------
# working problem


class _Problem:
    """Point set in working coordinates plus everything the loop needs."""

    def __init__(self, X, cfg: MedianConfig):
        self.X = X
        self.cfg = cfg
        self.n, self.d = X.shape
        self.nu = cfg.resolve_nu(self.d)
        self.m = window_size(self.n, self.nu)
        wh = whiten(X)
        self.rank = wh.rank
        self.mean = X.mean(axis=0)
        if cfg.equivariant_mode == "whitened":
            self.Z = np.ascontiguousarray(wh.points[:, : wh.rank])
            self.A = wh.transform.A[: wh.rank]
        else:
            self.Z = X
            self.A = np.eye(self.d)
        self.r = self.Z.shape[1]
        self.rng = np.random.default_rng(cfg.seed)
        self.firsts, self.inverse = _unique_rows(self.Z)
        self.Zu = self.Z[self.firsts]

    # directions ---------------------------------------------------------

    def to_raw(self, u):
        return unit(self.A.T @ u)

    def to_work(self, x):
        if self.cfg.equivariant_mode == "whitened":
            return self.A @ (x - self.mean)
        return x

    def base_directions(self):
        dirs = [np.eye(self.r)]
        if self.cfg.equivariant_mode == "raw" and self.d > 1:
            _, U = np.linalg.eigh(np.cov(self.X.T, bias=True))
            dirs += [U.T, np.full((1, self.d), 1.0 / math.sqrt(self.d))]
        return np.vstack(dirs)

    def candidates(self, z):
        parts = []
        K = self.cfg.directions_random
        if K > 0:
            G = self.rng.standard_normal((K, self.r))
            parts.append(G)
        if self.cfg.directions_data:
            parts.append(self.base_directions())
            q = min(self.cfg.data_subsample, self.n)
            idx = np.sort(self.rng.choice(self.n, size=q, replace=False))
            diff = z[None, :] - self.Z[idx]
            parts.append(diff)
            parts.append(self.hyperplane_normals(q))
        if self.r == 2 and self.cfg.grid_2d > 0:
            ang = np.arange(self.cfg.grid_2d) * (math.pi / self.cfg.grid_2d)
            parts.append(np.column_stack([np.cos(ang), np.sin(ang)]))
        U = np.vstack(parts)
        nrm = np.linalg.norm(U, axis=1)
        keep = nrm > 1e-12 * max(1.0, nrm.max(initial=0.0))
        return U[keep] / nrm[keep, None]

    def hyperplane_normals(self, q):
        """Normals of hyperplanes through ``r`` random distinct points.

        Directions along which many points share one projection are such
        normals; random directions hit them with probability zero.
        """
        r, nu = self.r, self.Zu.shape[0]
        if r < 2 or nu < r or q <= 0:
            return np.empty((0, r))
        idx = np.stack([self.rng.choice(nu, size=r, replace=False) for _ in range(q)])
        T = self.Zu[idx]  # (q, r, r)
        D = T[:, 1:, :] - T[:, :1, :]
        _, s, Vt = np.linalg.svd(D, full_matrices=True)
        ok = s[:, -1] > 1e-9 * np.maximum(s[:, 0], np.finfo(float).tiny)
        return Vt[ok, -1, :]

    # scanning -----------------------------------------------------------

    def scan(self, U, z=None):
        P = U @ self.Z.T
        order = np.argsort(P, axis=1, kind="stable")
        Ps = np.take_along_axis(P, order, axis=1)
        pz = None if z is None else U @ z
        tol = TOL.eq * max(float(np.abs(P).max()), np.finfo(float).tiny)
        return order, scan_windows(Ps, self.m, pz, tol)

    def slab(self, u, order_row, window, kind):
        a, s = int(window[0]), int(window[1])
        return SlabConstraint.from_subset(self.Z, u, np.sort(order_row[a:a + s]), kind)

    def slabs_for(self, U, order, scan, rows, kinds=("worst", "lo", "hi", "min_sigma")):
        out = []
        windows = {"worst": scan.wr_window, "lo": scan.lo_window,
                   "hi": scan.hi_window, "min_sigma": scan.ms_window}
        for r in rows:
            seen = set()
            for kind in kinds:
                w = tuple(windows[kind][r])
                if kind == "worst" and np.isnan(scan.worst_ratio[r]):
                    continue
                if w in seen:
                    continue
                seen.add(w)
                out.append(self.slab(U[r], order[r], w, kind))
        return out

    # local refinement ---------------------------------------------------

    def worst_ratio(self, u, z):
        _, sc = self.scan(u[None, :], z)
        return float(sc.worst_ratio[0])

    def ascent(self, u, z, score):
        step = self.cfg.ascent_step
        for _ in range(self.cfg.ascent_steps):
            if not np.isfinite(score):
                break
            order, sc = self.scan(u[None, :], z)
            a, s = sc.wr_window[0]
            Q = self.Z[order[0, a:a + s]]
            qbar = Q.mean(axis=0)
            num = float(np.dot(z - qbar, u))
            dev = (Q - qbar) @ u
            den = 2.0 * np.abs(dev).mean()
            if den <= 0.0:
                break
            g_num = math.copysign(1.0, num) * (z - qbar)
            g_den = 2.0 * (np.sign(dev)[:, None] * (Q - qbar)).mean(axis=0)
            g = (g_num * den - abs(num) * g_den) / den ** 2
            g -= np.dot(g, u) * u
            gn = np.linalg.norm(g)
            if gn < 1e-14:
                break
            trial = unit(u + step * g / gn)
            new = self.worst_ratio(trial, z)
            if new > score:
                u, score = trial, new
            else:
                step *= 0.5
                if step < 1e-6:
                    break
        return u, score

    # one oracle round ---------------------------------------------------

    def violations(self, z):
        U = self.candidates(z)
        order, sc = self.scan(U, z)
        viol = np.maximum(sc.worst_ratio - 1.0, 0.0)
        return U, order, sc, viol


def _ranked(viol):
    # descending violation, ties by candidate index (deterministic)
    return np.lexsort((np.arange(viol.size), -viol))


def find_violating_direction(X, x, cfg: MedianConfig | None = None):
    """Most violated candidate direction at ``x``, or ``None``.

    Candidates are random unit vectors (in whitened coordinates when
    ``cfg.equivariant_mode == "whitened"``) plus data-driven directions; the
    best one is refined by normalised gradient ascent. The violation is the
    largest slab ratio over admissible windows minus one, so ``None`` means
    every candidate slab holds ``x`` within ``1 + slack_eps`` of its width.
    Returns ``(direction, violation)`` with the direction in input coordinates.
    """
    X = as_points(X)
    cfg = cfg or MedianConfig()
    x = np.asarray(x, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("query point must be finite")
    prob = _Problem(X, cfg)
    if prob.r == 0:
        return None
    z = prob.to_work(x)
    U, _, sc, viol = prob.violations(z)
    best = int(_ranked(viol)[0])
    u, score = U[best], float(sc.worst_ratio[best])
    if prob.d > 1:
        u, score = prob.ascent(u, z, score)
    v = max(score - 1.0, 0.0)
    if v <= cfg.slack_eps:
        return None
    return prob.to_raw(u), v


def build_slab(X, v, window=None, nu: float | None = None) -> SlabConstraint:
    """Slab of direction ``v`` for a sorted-order window ``(start, size)``.

    Without a window the minimum-scale window of admissible size is used.
    """
    X = as_points(X)
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != X.shape[1]:
        raise DimensionMismatch("direction dimension does not match points")
    nu = 1.0 / (3.0 * X.shape[1]) if nu is None else nu
    m = window_size(X.shape[0], nu)
    proj = X @ v
    order = np.argsort(proj, kind="stable")
    if window is None:
        sc = scan_windows(proj[order][None, :], m)
        window = sc.ms_window[0]
    a, s = int(window[0]), int(window[1])
    if s < m:
        raise ValueError(f"window size {s} below the admissible minimum {m}")
    return SlabConstraint.from_subset(X, v, np.sort(order[a:a + s]), "window")


# ---------------------------------------------------------------------------
# main loop


def _certificate(slabs, x):
    vals = [s.outlyingness(x) for s in slabs]
    return max(vals) if vals else 0.0


def _raw_slabs(X, prob, slabs):
    return [SlabConstraint.from_subset(X, prob.to_raw(s.v), s.subset, s.kind) for s in slabs]


def _median_1d(X, prob, cfg):
    # effective dimension <= 1: the feasible set is an interval on a line, solved exactly
    n = X.shape[0]
    if prob.rank == 0:
        w = np.full(n, 1.0 / n)
        return MedianReport(X[0].copy(), 0.0, 0, 0, w, {"flags": [], "mode": "exact-1d"})
    if X.shape[1] == 1:
        u_raw = np.ones(1)
    else:
        u_raw = np.linalg.eigh(np.cov(X.T, bias=True))[1][:, -1]
    t = X @ u_raw
    iv = directional_feasible_interval(t, prob.nu)
    mid = iv.midpoint
    lo_i, hi_i = int(np.argmin(t)), int(np.argmax(t))
    w = np.zeros(n)
    span = t[hi_i] - t[lo_i]
    lam = 0.0 if span == 0 else (t[hi_i] - mid) / span
    w[lo_i] += lam
    w[hi_i] += 1.0 - lam
    if X.shape[1] == 1:
        est = np.array([mid])
    else:
        est = w @ X
    order = np.argsort(t, kind="stable")
    sc = scan_windows(t[order][None, :], prob.m)
    pool = []
    seen = set()
    for kind, win in (("lo", sc.lo_window[0]), ("hi", sc.hi_window[0]), ("min_sigma", sc.ms_window[0])):
        key = tuple(win)
        if key not in seen:
            seen.add(key)
            a, s = key
            pool.append(SlabConstraint.from_subset(X, u_raw, np.sort(order[a:a + s]), kind))
    flags = list(iv.flags)
    return MedianReport(est, _certificate(pool, est), 0, len(pool), w,
                        {"flags": flags, "mode": "exact-1d", "interval": (iv.lo, iv.hi)}, pool)


def high_dim_median(X, cfg: MedianConfig | None = None) -> MedianReport:
    """Hull point whose trimmed outlyingness is at most ``2 (1 + slack_eps)``.

    In one (effective) dimension the exact midpoint of the feasible interval
    is returned. Otherwise the cutting-plane loop described in the module
    docstring runs until no candidate direction is violated beyond
    ``slack_eps`` or ``max_iterations`` is reached (flag ``iteration_limit``;
    the estimate and its certificate are still returned).
    """
    X = as_points(X)
    cfg = cfg or MedianConfig()
    prob = _Problem(X, cfg)
    if prob.rank <= 1:
        return _median_1d(X, prob, cfg)

    U0 = prob.base_directions()
    order, sc = prob.scan(U0)
    pool = prob.slabs_for(U0, order, sc, range(U0.shape[0]), kinds=("lo", "hi", "min_sigma"))
    flags = []
    it = 0
    gap = 0.0
    converged = False
    z = w = None
    t = math.inf
    while True:
        V = np.array([s.v for s in pool])
        centers = np.array([s.center for s in pool])
        hws = np.array([s.halfwidth for s in pool])
        tols = np.array([s.tol for s in pool])
        wu, z, t, gap = _solve_pool(prob.Zu, V, centers, hws, tols, anchor=prob.Z.mean(axis=0))
        w = _expand_weights(wu, prob.inverse, prob.n)
        U, order, sc, viol = prob.violations(z)
        ranked = _ranked(viol)
        best = int(ranked[0])
        u_best, score = prob.ascent(U[best], z, float(sc.worst_ratio[best]))
        best_viol = max(score - 1.0, 0.0)
        if best_viol <= cfg.slack_eps:
            converged = True
            break
        if it >= cfg.max_iterations:
            flags.append("iteration_limit")
            break
        it += 1
        o_best, sc_best = prob.scan(u_best[None, :], z)
        pool += prob.slabs_for(u_best[None, :], o_best, sc_best, [0])
        extra = [int(r) for r in ranked[1:cfg.cuts_per_round] if viol[r] > cfg.slack_eps]
        pool += prob.slabs_for(U, order, sc, extra)

    # final sweep: last candidate round, the refined direction and every pool direction;
    # only the worst few slabs are kept, which is all the certificate needs
    Up = np.vstack([np.array([s.v for s in pool]), U, u_best[None, :]])
    o_p, sc_p = prob.scan(Up, z)
    top = _ranked(np.nan_to_num(sc_p.worst_ratio, nan=-1.0))[:AUDIT_KEEP]
    audit = prob.slabs_for(Up, o_p, sc_p, top, kinds=("worst",))

    estimate = w @ X
    raw_pool = _raw_slabs(X, prob, pool)
    raw_audit = _raw_slabs(X, prob, audit)
    constraints = raw_pool + raw_audit
    cert = _certificate(constraints, estimate)
    if not converged:
        log.warning("median loop stopped at the iteration limit (violation %.3g)", best_viol)
    diagnostics = {
        "flags": flags,
        "mode": cfg.equivariant_mode,
        "pool_ratio": t,
        "lp_gap": gap,
        "final_violation": best_viol,
        "nu": prob.nu,
        "rank": prob.rank,
    }
    return MedianReport(estimate, cert, it, len(pool), w, diagnostics, constraints)


def helly_feasibility_certificate(X, constraints, nu: float) -> np.ndarray:
    """Mean of the common subset of ``d + 1`` slabs, checked against each slab.

    Each constraint must carry its subset. Raises ``ValueError`` when the
    common subset is smaller than ``(1 - (d + 1) nu) n`` or when the mean
    leaves a slab (which the size bound rules out for ``nu <= 1/(3d)``).
    """
    X = as_points(X)
    n, d = X.shape
    R = None
    for c in constraints:
        S = set(int(i) for i in c.subset)
        if len(S) < window_size(n, nu):
            raise ValueError("constraint subset is smaller than the admissible size")
        R = S if R is None else R & S
    R = np.array(sorted(R or ()), dtype=np.intp)
    need = (1.0 - len(constraints) * nu) * n
    if R.size == 0 or R.size < need - 1e-9:
        raise ValueError(f"common subset has {R.size} points, need at least {need:.2f}")
    mu_R = X[R].mean(axis=0)
    for c in constraints:
        sigma = 0.5 * c.halfwidth
        dev = abs(float(mu_R @ c.v) - c.center)
        bound = len(c.subset) / R.size * sigma
        tol = 1e-9 * max(1.0, abs(c.center), float(np.abs(X @ c.v).max()))
        if dev > bound + tol or dev > 2.0 * sigma + tol:
            raise ValueError(f"subset mean leaves a slab: deviation {dev:.3g} > {min(bound, 2 * sigma):.3g}")
    return mu_R
