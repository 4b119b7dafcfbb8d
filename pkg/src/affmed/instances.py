"""Hard-instance distributions and contamination models.

Every discrete kind is a finite set of atoms with exact rational masses,
optionally smoothed by independent Rademacher cube noise ``sigma * Z`` with
``Z`` uniform on ``{-1, +1}^d``. Atoms are listed in a canonical order
(``e_1, ..., e_d`` followed by the origin or ``1/d``) and sampled by inverse
CDF, so draws are reproducible from the seed alone.

Kinds and their ``params``:

``intuition_gamma``
    ``gamma``, ``noise``. Mass ``1/(d+1) + gamma`` on ``e_1`` and
    ``1/(d+1) - gamma/d`` on the other basis vectors and the origin.
``heavytailed_lb``
    ``index`` (1-based), ``eps``, ``noise``. Mass ``eps^2/d`` on ``e_j`` for
    ``j != index``, ``eps^2/d^2`` on ``e_index``, the rest at the origin.
``breakdown_lb``
    ``index`` in ``0..d+1``, ``r``; ``sigma = 1/(2 d r)``. Index 0 is uniform
    on the basis vectors and the origin, ``d + 1`` uniform on the basis
    vectors, and ``1..d`` drops ``e_index`` from the uniform law.
``quant_lb``
    ``index`` in ``0..d``, ``eta``; ``r = sqrt(d eta / (1 - d eta)) / 2`` and
    ``sigma = eta / (4 r)``. Atoms are the basis vectors and ``1/d``.
``gaussian``
    ``mean`` and ``cov`` (defaults: zero and identity).
``custom_discrete``
    ``atoms``, ``probs`` and ``noise``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .geometry import as_points

KINDS = ("intuition_gamma", "heavytailed_lb", "breakdown_lb", "quant_lb", "gaussian", "custom_discrete")


@dataclass(frozen=True)
class DistributionSpec:
    kind: str
    d: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if int(self.d) < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "params", dict(self.params))
        if self.kind != "gaussian":
            _, probs = discrete_law(self)
            if any(p < 0 for p in probs) or abs(float(sum(probs)) - 1.0) > 1e-12:
                raise ValueError(f"{self.kind}: masses must be nonnegative and sum to 1")
        if self.noise < 0:
            raise ValueError("noise scale must be nonnegative")

    @property
    def noise(self) -> float:
        if self.kind == "breakdown_lb":
            return 1.0 / (2.0 * self.d * float(self.params["r"]))
        if self.kind == "quant_lb":
            return float(_quant_r_sigma(self.d, float(self.params["eta"]))[1])
        return float(self.params.get("noise", 0.0))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "d": self.d, "params": _jsonable(self.params)}

    @classmethod
    def from_dict(cls, obj: dict) -> "DistributionSpec":
        return cls(obj["kind"], int(obj["d"]), dict(obj.get("params", {})))


class Moments(NamedTuple):
    mean: np.ndarray
    cov: np.ndarray
    nonsingular: bool


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


# ---------------------------------------------------------------------------
# discrete laws


def _basis_and(d: int, last) -> np.ndarray:
    return np.vstack([np.eye(d), np.asarray(last, dtype=np.float64)[None, :]])


def _quant_r_sigma(d: int, eta: float):
    if not 0.0 < eta < 1.0 / (d + 1):
        raise ValueError(f"quant_lb needs 0 < eta < 1/(d+1), got eta={eta}")
    r = 0.5 * math.sqrt(d * eta / (1.0 - d * eta))
    return r, eta / (4.0 * r)


def _index(spec: DistributionSpec, lo: int, hi: int) -> int:
    i = int(spec.params.get("index", lo))
    if not lo <= i <= hi:
        raise ValueError(f"{spec.kind}: index must lie in [{lo}, {hi}], got {i}")
    return i


def discrete_law(spec: DistributionSpec):
    """Atoms ``(K, d)`` and exact masses (``Fraction``) in canonical order."""
    d = spec.d
    p = spec.params
    if spec.kind == "intuition_gamma":
        g = Fraction(p.get("gamma", 0.0))
        base = Fraction(1, d + 1)
        probs = [base + g] + [base - g / d] * d
        return _basis_and(d, np.zeros(d)), probs
    if spec.kind == "heavytailed_lb":
        if d < 2:
            raise ValueError("heavytailed_lb needs d >= 2")
        i = _index(spec, 1, d)
        e2 = Fraction(p["eps"]) ** 2
        probs = [e2 / d ** 2 if j == i else e2 / d for j in range(1, d + 1)]
        probs.append(1 - Fraction(d - 1, d) * e2 - e2 / d ** 2)
        return _basis_and(d, np.zeros(d)), probs
    if spec.kind == "breakdown_lb":
        if float(p["r"]) <= 0:
            raise ValueError("breakdown_lb needs r > 0")
        i = _index(spec, 0, d + 1)
        if i == 0:
            probs = [Fraction(1, d + 1)] * (d + 1)
        elif i == d + 1:
            probs = [Fraction(1, d)] * d + [Fraction(0)]
        else:
            probs = [Fraction(0) if j == i else Fraction(1, d) for j in range(1, d + 1)] + [Fraction(1, d)]
        return _basis_and(d, np.zeros(d)), probs
    if spec.kind == "quant_lb":
        if d < 2:
            raise ValueError("quant_lb needs d >= 2")
        eta = Fraction(p["eta"])
        _quant_r_sigma(d, float(eta))
        i = _index(spec, 0, d)
        if i == 0:
            probs = [eta] * d
        else:
            probs = [Fraction(0) if j == i else Fraction(d, d - 1) * eta for j in range(1, d + 1)]
        probs.append(1 - d * eta)
        return _basis_and(d, np.full(d, 1.0 / d)), probs
    if spec.kind == "custom_discrete":
        atoms = np.atleast_2d(np.asarray(p["atoms"], dtype=np.float64))
        if atoms.shape[1] != d:
            raise ValueError(f"custom_discrete atoms have dimension {atoms.shape[1]}, expected {d}")
        probs = [Fraction(q) for q in p["probs"]]
        if len(probs) != atoms.shape[0]:
            raise ValueError("custom_discrete needs one probability per atom")
        return atoms, probs
    raise ValueError(f"{spec.kind} is not a discrete kind")


# ---------------------------------------------------------------------------
# sampling and moments


def sample(spec: DistributionSpec, n: int, seed) -> np.ndarray:
    """``n`` i.i.d. draws as an ``(n, d)`` array, deterministic in ``seed``."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    d = spec.d
    if spec.kind == "gaussian":
        mom = moments(spec)
        lam, U = np.linalg.eigh(mom.cov)
        root = U * np.sqrt(np.clip(lam, 0.0, None))
        return mom.mean + rng.standard_normal((n, d)) @ root.T
    atoms, probs = discrete_law(spec)
    cdf = np.cumsum([float(q) for q in probs])
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    X = atoms[np.minimum(idx, atoms.shape[0] - 1)]
    sigma = spec.noise
    if sigma > 0:
        X = X + sigma * (2.0 * rng.integers(0, 2, size=(n, d)) - 1.0)
    return X


def moments(spec: DistributionSpec) -> Moments:
    """Exact mean and covariance (divisor-free population moments)."""
    d = spec.d
    if spec.kind == "gaussian":
        mean = np.asarray(spec.params.get("mean", np.zeros(d)), dtype=np.float64).reshape(d)
        cov = np.asarray(spec.params.get("cov", np.eye(d)), dtype=np.float64).reshape(d, d)
        cov = 0.5 * (cov + cov.T)
        lam = np.linalg.eigvalsh(cov)
        if lam[0] < -1e-10 * max(1.0, abs(lam[-1])):
            raise ValueError("gaussian covariance is not PSD")
        return Moments(mean, cov, bool(lam[0] > 1e-10 * max(lam[-1], 1e-300)))
    atoms, probs = discrete_law(spec)
    p = np.array([float(q) for q in probs])
    mean = p @ atoms
    cov = (atoms * p[:, None]).T @ atoms - np.outer(mean, mean)
    sigma = spec.noise
    cov = 0.5 * (cov + cov.T) + sigma ** 2 * np.eye(d)
    lam = np.linalg.eigvalsh(cov)
    nonsingular = sigma > 0 or bool(lam[0] > 1e-10 * max(lam[-1], 1e-300))
    return Moments(mean, cov, nonsingular)


def heavytailed_eps(n: int, d: int, delta: float) -> float:
    """``sqrt(d log(1/(d delta)) / (n log d)) / 4`` with natural logs."""
    if d < 2:
        raise ValueError("heavytailed_eps needs d >= 2")
    if not 0.0 < d * delta < 1.0:
        raise ValueError(f"need 0 < d*delta < 1, got d*delta = {d * delta}")
    return 0.25 * math.sqrt(d * math.log(1.0 / (d * delta)) / (n * math.log(d)))


def heavytailed_bound(spec: DistributionSpec) -> np.ndarray:
    """Diagonal matrix dominating the covariance of a ``heavytailed_lb`` law."""
    d, i = spec.d, int(spec.params.get("index", 1))
    e2 = float(spec.params["eps"]) ** 2
    diag = np.full(d, e2 / d)
    diag[i - 1] = e2 / d ** 2
    return np.diag(diag) + spec.noise ** 2 * np.eye(d)


# ---------------------------------------------------------------------------
# families


def breakdown_family(d: int, r: float) -> list[DistributionSpec]:
    """Members ``0..d+1``; member 0 mixes every ``1..d`` member with ``e_i``.

    The identity ``D_0 = d/(d+1) D_i + 1/(d+1) delta_{e_i}`` is checked on the
    atoms in exact arithmetic before the family is returned.
    """
    if d <= 3:
        raise ValueError("breakdown family needs d > 3")
    if r <= 0:
        raise ValueError("r must be positive")
    fam = [DistributionSpec("breakdown_lb", d, {"index": i, "r": r}) for i in range(d + 2)]
    _, p0 = discrete_law(fam[0])
    w = Fraction(1, d + 1)
    for i in range(1, d + 1):
        _, pi = discrete_law(fam[i])
        point = [Fraction(int(j == i - 1)) for j in range(d + 1)]
        if not mixture_holds(p0, pi, point, w):
            raise AssertionError(f"mixture identity fails for member {i}")
    return fam


def quant_family(d: int, eta: float) -> list[DistributionSpec]:
    """Members ``0..d`` of the quantitative-contamination family.

    Member 0 and member ``i`` differ by moving mass ``eta`` from the other
    basis vectors (uniformly) onto ``e_i``:
    ``D_0 = D_i + eta (delta_{e_i} - Q_i)`` with ``Q_i`` uniform on
    ``{e_j : j != i}``. So ``D_0`` is an ``eta``-fraction replacement of
    ``D_i``. The identity is checked exactly on the atoms.
    """
    if d <= 3:
        raise ValueError("quant family needs d > 3")
    _quant_r_sigma(d, eta)
    fam = [DistributionSpec("quant_lb", d, {"index": i, "eta": eta}) for i in range(d + 1)]
    _, p0 = discrete_law(fam[0])
    e = Fraction(eta)
    for i in range(1, d + 1):
        _, pi = discrete_law(fam[i])
        moved = [pi[j] + (e if j == i - 1 else 0) - (e / (d - 1) if j < d and j != i - 1 else 0)
                 for j in range(d + 1)]
        if moved != p0:
            raise AssertionError(f"replacement identity fails for member {i}")
    return fam


def mixture_holds(p0, pi, point, w) -> bool:
    """``p0 == (1 - w) pi + w point`` atom by atom in exact arithmetic."""
    w = Fraction(w)
    return all(a == (1 - w) * b + w * c for a, b, c in zip(p0, pi, point))


# ---------------------------------------------------------------------------
# contamination

MODES = ("none", "huber_mix", "replace")
STRATEGIES = ("point_mass_at", "far_along_min_variance")


@dataclass(frozen=True)
class ContaminationSpec:
    """How an ``eta`` fraction of a sample is corrupted.

    ``huber_mix`` resamples each point from ``payload["distribution"]`` with
    probability ``eta``. ``replace`` overwrites exactly ``floor(eta n)``
    random points, either with ``payload["point"]`` (``point_mass_at``) or
    with ``mean + scale * sqrt(lambda_min) * v_min`` of the clean law
    (``far_along_min_variance``), a point at Mahalanobis distance ``scale``.
    """

    mode: str = "none"
    eta: float = 0.0
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown contamination mode {self.mode!r}")
        if not 0.0 <= self.eta < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta}")
        if self.mode == "replace" and self.payload.get("strategy", "point_mass_at") not in STRATEGIES:
            raise ValueError(f"unknown replacement strategy {self.payload.get('strategy')!r}")
        if self.mode == "huber_mix" and "distribution" not in self.payload:
            raise ValueError("huber_mix needs a payload distribution")

    @property
    def label(self) -> str:
        if self.mode == "none":
            return "none"
        if self.mode == "huber_mix":
            return "huber"
        return "replace:" + self.payload.get("strategy", "point_mass_at")

    def to_dict(self) -> dict:
        payload = dict(self.payload)
        if isinstance(payload.get("distribution"), DistributionSpec):
            payload["distribution"] = payload["distribution"].to_dict()
        return {"mode": self.mode, "eta": self.eta, "payload": _jsonable(payload)}

    @classmethod
    def from_dict(cls, obj: dict) -> "ContaminationSpec":
        payload = dict(obj.get("payload", {}))
        if isinstance(payload.get("distribution"), dict):
            payload["distribution"] = DistributionSpec.from_dict(payload["distribution"])
        return cls(obj.get("mode", "none"), float(obj.get("eta", 0.0)), payload)


def _replacement_point(spec: ContaminationSpec, base: DistributionSpec | None, d: int) -> np.ndarray:
    strategy = spec.payload.get("strategy", "point_mass_at")
    if strategy == "point_mass_at":
        point = np.asarray(spec.payload["point"], dtype=np.float64).ravel()
        if point.shape[0] != d:
            raise ValueError(f"replacement point has dimension {point.shape[0]}, expected {d}")
        return point
    if base is None:
        raise ValueError("far_along_min_variance needs the clean distribution")
    mom = moments(base)
    lam, U = np.linalg.eigh(mom.cov)
    scale = float(spec.payload.get("scale", 10.0))
    return mom.mean + scale * math.sqrt(max(lam[0], 0.0)) * U[:, 0]


def contaminate(X, spec: ContaminationSpec, seed, base: DistributionSpec | None = None):
    """Corrupt ``X`` according to ``spec``; returns ``(X', sorted indices)``."""
    X = as_points(X).copy()
    n, d = X.shape
    rng = np.random.default_rng(seed)
    if spec.mode == "none" or spec.eta == 0.0:
        return X, np.empty(0, dtype=np.intp)
    if spec.mode == "huber_mix":
        P = spec.payload["distribution"]
        if P.d != d:
            raise ValueError("contaminating distribution has the wrong dimension")
        idx = np.flatnonzero(rng.random(n) < spec.eta)
        if idx.size:
            X[idx] = sample(P, idx.size, rng.integers(2 ** 63))
        return X, idx
    m = int(math.floor(spec.eta * n + 1e-9))
    idx = np.sort(rng.choice(n, size=m, replace=False))
    X[idx] = _replacement_point(spec, base, d)
    return X, idx
