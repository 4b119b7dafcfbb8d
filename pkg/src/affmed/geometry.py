"""Point sets, projections, covariance and the Mahalanobis norm.

Point sets are plain ``(n, d)`` float64 arrays; :func:`as_points` validates
and normalises user input into that form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg

from .config import TOL
from .errors import DimensionMismatch, SingularCovariance


def as_points(X) -> np.ndarray:
    """Return ``X`` as a C-contiguous ``(n, d)`` float64 array.

    A 1-D input is read as ``n`` points in one dimension.
    """
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D point array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"point set must have n >= 1 and d >= 1, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point set contains NaN or infinite coordinates")
    return np.ascontiguousarray(arr)


def unit(v) -> np.ndarray:
    """Normalise ``v`` to a unit direction."""
    v = np.asarray(v, dtype=np.float64).ravel()
    nrm = np.linalg.norm(v)
    if not np.isfinite(nrm) or nrm == 0.0:
        raise ValueError("cannot normalise a zero or non-finite vector")
    return v / nrm


def is_unit(v, tol: float = TOL.unit) -> bool:
    return abs(np.linalg.norm(v) - 1.0) <= tol


def project(X, v) -> np.ndarray:
    """Inner products ``<x_i, v>`` for every point, order preserved."""
    X = as_points(X)
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.shape[0] != X.shape[1]:
        raise DimensionMismatch(f"direction has dimension {v.shape[0]}, points have {X.shape[1]}")
    return X @ v


def sample_mean(X) -> np.ndarray:
    return as_points(X).mean(axis=0)


def sample_cov(X) -> np.ndarray:
    """Covariance with divisor ``n``; symmetrised exactly."""
    X = as_points(X)
    Xc = X - X.mean(axis=0)
    C = Xc.T @ Xc / X.shape[0]
    return 0.5 * (C + C.T)


def check_spd(S, definite: bool = True) -> np.ndarray:
    """Validate a symmetric PSD (or PD) matrix and return it as an array."""
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got {S.shape}")
    scale = max(np.abs(S).max(), np.finfo(float).tiny)
    if np.abs(S - S.T).max() > 1e-10 * scale:
        raise ValueError("covariance is not symmetric")
    lam_min = np.linalg.eigvalsh(0.5 * (S + S.T))[0]
    if definite and lam_min < TOL.pd * scale:
        raise SingularCovariance(f"smallest eigenvalue {lam_min:.3e} below tolerance")
    if lam_min < -1e-10 * scale:
        raise ValueError(f"covariance has negative eigenvalue {lam_min:.3e}")
    return S


def cholesky_pd(Sigma) -> np.ndarray:
    """Lower Cholesky factor of a positive-definite matrix.

    Raises :class:`SingularCovariance` when a pivot falls below
    ``TOL.pd`` relative to the largest diagonal entry.
    """
    S = np.atleast_2d(np.asarray(Sigma, dtype=np.float64))
    if S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got {S.shape}")
    scale = np.abs(np.diag(S)).max() if S.size else 0.0
    if not scale > 0.0:
        raise SingularCovariance("covariance has zero diagonal")
    try:
        L = np.linalg.cholesky(0.5 * (S + S.T))
    except np.linalg.LinAlgError as exc:
        raise SingularCovariance("covariance is not positive definite") from exc
    if np.min(np.diag(L)) ** 2 < TOL.pd * scale:
        raise SingularCovariance("covariance is singular to tolerance")
    return L


def mahalanobis_norm(x, Sigma) -> float:
    """``sqrt(x^T Sigma^{-1} x)`` via a triangular solve."""
    x = np.asarray(x, dtype=np.float64).ravel()
    L = cholesky_pd(Sigma)
    if L.shape[0] != x.shape[0]:
        raise DimensionMismatch(f"vector has dimension {x.shape[0]}, covariance {L.shape[0]}")
    y = linalg.solve_triangular(L, x, lower=True)
    return float(np.linalg.norm(y))


@dataclass(frozen=True)
class AffineMap:
    """``f(x) = A x + b``. ``A`` may be rank deficient (see :func:`whiten`)."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64).ravel()
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.A.shape[1]

    def apply(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            return self.A @ X + self.b
        return X @ self.A.T + self.b

    def is_nonsingular(self, tol: float = 1e-12) -> bool:
        if self.A.shape[0] != self.A.shape[1]:
            return False
        _, u = linalg.lu(self.A, permute_l=True)
        piv = np.abs(np.diag(u))
        scale = max(np.abs(self.A).max(), np.finfo(float).tiny)
        return bool(piv.min() > tol * scale)

    def inverse(self) -> "AffineMap":
        if not self.is_nonsingular():
            raise SingularCovariance("affine map is singular")
        Ainv = np.linalg.inv(self.A)
        return AffineMap(Ainv, -Ainv @ self.b)

    def pseudo_inverse_apply(self, Y) -> np.ndarray:
        """Map back from the image; exact for points in the affine span."""
        Y = np.asarray(Y, dtype=np.float64)
        P = np.linalg.pinv(self.A)
        if Y.ndim == 1:
            return P @ (Y - self.b)
        return (Y - self.b) @ P.T


class Whitening(NamedTuple):
    points: np.ndarray
    transform: AffineMap
    rank: int


def _canonical_frame(Z: np.ndarray) -> np.ndarray:
    # Orthogonal frame of whitened data that rotates with the data: eigenvectors of
    # the fourth-moment matrix E[|z|^2 z z^T], signs fixed by the first point with a
    # clearly nonzero coordinate. Makes the whitened coordinates affine invariant.
    r = Z.shape[1]
    if r <= 1:
        E = np.eye(r)
    else:
        sq = np.einsum("ij,ij->i", Z, Z)
        M = (Z * sq[:, None]).T @ Z / Z.shape[0]
        lam, E = np.linalg.eigh(0.5 * (M + M.T))
        E = E[:, np.argsort(-lam, kind="stable")]
    C = Z @ E
    scale = np.abs(C).max(axis=0) if C.size else np.ones(r)
    for j in range(r):
        col = C[:, j]
        hits = np.flatnonzero(np.abs(col) > 1e-6 * max(scale[j], 1e-300))
        if hits.size and col[hits[0]] < 0:
            E[:, j] = -E[:, j]
    return E


def whiten(X) -> Whitening:
    """Whiten a point set onto its affine span.

    Returns ``Y = A (X - mean)`` with identity sample covariance on the
    span, the affine map, and the rank of the sample covariance. ``Y`` keeps
    all ``d`` columns; columns beyond the rank are identically zero. The
    output frame is determined by the data alone, so whitening ``AX + b``
    yields the same ``Y`` as whitening ``X`` for nonsingular ``A``.
    """
    X = as_points(X)
    n, d = X.shape
    mean = X.mean(axis=0)
    C = sample_cov(X)
    lam, U = np.linalg.eigh(C)
    lam_max = lam[-1] if lam.size else 0.0
    keep = lam > max(lam_max, 0.0) * 1e-12 if lam_max > 0 else np.zeros(d, dtype=bool)
    r = int(keep.sum())
    W = np.zeros((d, d))
    if r:
        Ur = U[:, keep]
        Wr = (Ur / np.sqrt(lam[keep])).T
        Z = (X - mean) @ Wr.T
        E = _canonical_frame(Z)
        W[:r] = E.T @ Wr
    transform = AffineMap(W, -W @ mean)
    return Whitening(transform.apply(X), transform, r)
