"""Error metrics: Mahalanobis error and directional lower bounds.

For any direction ``v`` with ``v^T Sigma v > 0``,
``||x||_Sigma >= |<x, v>| / sqrt(v^T Sigma v)`` with equality at
``v = Sigma^{-1} x``. :func:`directional_certificate` maximises the right side
over a finite direction set, which gives a certified lower bound on the error
even when ``Sigma`` is singular.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .geometry import mahalanobis_norm
from .instances import DistributionSpec, moments

SWEEP_SIZE = 2048
SWEEP_SEED = 20240501


class Certificate(NamedTuple):
    value: float
    null: bool  # every direction had zero variance


def mahalanobis_error(estimate, spec: DistributionSpec) -> float:
    """``||estimate - mean||_Sigma`` for the exact moments of ``spec``.

    Raises :class:`~affmed.errors.SingularCovariance` for singular laws.
    """
    mom = moments(spec)
    return mahalanobis_norm(np.asarray(estimate, dtype=np.float64) - mom.mean, mom.cov)


def directional_certificate(estimate, mean, cov, directions, tol: float = 1e-12) -> Certificate:
    """``max_v |<estimate - mean, v>| / sqrt(v^T cov v)`` over the rows of ``directions``.

    Rows with ``v^T cov v <= tol * trace(cov)`` are skipped.
    """
    x = np.asarray(estimate, dtype=np.float64) - np.asarray(mean, dtype=np.float64)
    V = np.atleast_2d(np.asarray(directions, dtype=np.float64))
    S = np.asarray(cov, dtype=np.float64)
    var = np.einsum("ij,jk,ik->i", V, S, V)
    ok = var > tol * max(float(np.trace(S)), 1e-300)
    if not ok.any():
        return Certificate(0.0, True)
    vals = np.abs(V[ok] @ x) / np.sqrt(var[ok])
    return Certificate(float(vals.max()), False)


@lru_cache(maxsize=64)
def _sweep(d: int) -> np.ndarray:
    G = np.random.default_rng([SWEEP_SEED, d]).standard_normal((SWEEP_SIZE, d))
    G = np.vstack([np.eye(d), np.ones((1, d)), G])
    G /= np.linalg.norm(G, axis=1, keepdims=True)
    G.setflags(write=False)
    return G


def sweep_directions(d: int) -> np.ndarray:
    """Fixed direction set: axes, the diagonal and 2048 seeded random directions."""
    return _sweep(int(d))


def optimal_direction(x, cov) -> np.ndarray | None:
    """``pinv(cov) x`` (the maximiser on the range of ``cov``), or ``None``."""
    v = np.linalg.pinv(np.asarray(cov, dtype=np.float64), hermitian=True) @ np.asarray(x, dtype=np.float64)
    nrm = np.linalg.norm(v)
    return None if nrm == 0.0 or not np.isfinite(nrm) else v / nrm
