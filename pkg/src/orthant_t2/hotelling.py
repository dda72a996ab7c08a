"""T-squared and R-squared for an arbitrary multidimensional sample.

A sample is an n x d matrix X whose rows are the observations. With
nu = (1, ..., 1)^T and P the orthogonal projector onto the column span of X,

    n R^2 = nu^T P nu,      T^2 = R^2 / (1 - R^2)   (infinite iff R^2 = 1).

P is built from a spectral decomposition of the smaller Gram matrix with a
relative rank cutoff, which realizes the Moore-Penrose pseudoinverse and makes
P unique, symmetric and idempotent. The regularized definitions

    T2_eps = xbar (C + eps I)^-1 xbar^T,   R2_eps = xbar (S + eps I)^-1 xbar^T

with S = X^T X / n and C = S - xbar^T xbar converge monotonically to the same
quantities as eps decreases to 0 and satisfy T2 R2 = T2 - R2 for every eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# R^2 within this of 1 is reported as exactly 1 (and T^2 as infinity).
_R2_ONE_TOL = 1e-12


@dataclass(frozen=True)
class ProjectionSummary:
    rank: int
    r_squared: float
    t_squared: float  # math.inf when r_squared == 1
    nu_projection: float


def as_sample_matrix(X) -> np.ndarray:
    """Validate and coerce to an n x d float matrix (1-d input is one column)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, np.newaxis]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DomainError(f"sample must be a nonempty n x d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("sample entries must all be finite")
    return arr


def projector(X) -> tuple[np.ndarray, int]:
    """Orthogonal projector onto the column span of X, with its rank.

    Eigenvalues of the smaller Gram matrix below max(n, d) * eps * lambda_max
    are treated as zero.
    """
    X = as_sample_matrix(X)
    n, d = X.shape
    if d <= n:
        gram = X.T @ X
    else:
        gram = X @ X.T
    w, v = np.linalg.eigh(gram)
    wmax = float(w[-1]) if w.size else 0.0
    if wmax <= 0.0:
        return np.zeros((n, n)), 0
    tol = max(n, d) * np.finfo(float).eps * wmax
    keep = w > tol
    rank = int(np.count_nonzero(keep))
    if rank == 0:
        return np.zeros((n, n)), 0
    if d <= n:
        basis = X @ (v[:, keep] / np.sqrt(w[keep]))
    else:
        basis = v[:, keep]
    P = basis @ basis.T
    return 0.5 * (P + P.T), rank


def r_squared(X) -> ProjectionSummary:
    """R^2, T^2 and the rank via the projector formulation."""
    X = as_sample_matrix(X)
    n = X.shape[0]
    P, rank = projector(X)
    nu = np.ones(n)
    nu_proj = float(nu @ P @ nu)
    r2 = min(max(nu_proj / n, 0.0), 1.0)
    if r2 >= 1.0 - _R2_ONE_TOL:
        r2 = 1.0
        t2 = math.inf
    else:
        t2 = r2 / (1.0 - r2)
    return ProjectionSummary(rank=rank, r_squared=r2, t_squared=t2, nu_projection=nu_proj)


def r_squared_signed(X, signs) -> float:
    """eps^T P eps / n for a fixed sign pattern eps in {-1, +1}^n.

    This is the quantity whose distribution over uniform signs matches n R^2
    under orthant symmetry.
    """
    X = as_sample_matrix(X)
    e = np.asarray(signs, dtype=float).ravel()
    n = X.shape[0]
    if e.shape[0] != n or not np.all(np.abs(e) == 1.0):
        raise DomainError("signs must be a length-n vector of +/-1")
    P, _ = projector(X)
    return float(e @ P @ e) / n


def regularized(X, eps: float) -> tuple[float, float]:
    """(T2_eps, R2_eps) from the ridge-regularized covariance and second-moment matrices."""
    X = as_sample_matrix(X)
    eps = float(eps)
    if not eps > 0.0:
        raise DomainError(f"regularization eps must be positive, got {eps!r}")
    n, d = X.shape
    xbar = X.mean(axis=0)
    S = X.T @ X / n
    C = S - np.outer(xbar, xbar)
    eye = np.eye(d)
    t2 = float(xbar @ np.linalg.solve(C + eps * eye, xbar))
    r2 = float(xbar @ np.linalg.solve(S + eps * eye, xbar))
    return t2, r2
