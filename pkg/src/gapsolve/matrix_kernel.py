"""Dense symmetric linear algebra: Cholesky, SPD solves, generalized eigenproblems.

Matrices are plain 2-D ``numpy`` float arrays. Only the lower triangle of a
symmetric input is treated as authoritative; helpers symmetrize from it.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import lapack

from .errors import DimensionMismatch, NotPositiveDefinite, ZeroVector

PIVOT_TOL = 1e-14


@dataclass(frozen=True)
class SpdFactor:
    """Lower Cholesky factor ``lower`` with ``S = lower @ lower.T``."""

    lower: np.ndarray

    @property
    def n(self) -> int:
        return self.lower.shape[0]


@dataclass(frozen=True)
class EigenDecomp:
    values: np.ndarray
    vectors: np.ndarray


@lru_cache(maxsize=64)
def _upper_idx(n: int):
    return np.triu_indices(n, 1)


def as_sym(a) -> np.ndarray:
    """Return a float copy of ``a`` symmetrized from its lower triangle."""
    a = np.array(a, dtype=float, ndmin=2)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatch("matrix dimension must be at least 1")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    iu = _upper_idx(a.shape[0])
    a[iu] = a.T[iu]
    return a


def _chol(s: np.ndarray, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    # s is assumed symmetric and finite
    d = s.diagonal()
    thresh = pivot_tol * float(np.max(np.abs(d)))
    if thresh == 0.0 or d.min() <= thresh:
        raise NotPositiveDefinite("matrix is not positive definite (non-positive diagonal)")
    low, info = lapack.dpotrf(s, lower=1, clean=1)
    if info != 0:
        raise NotPositiveDefinite(f"matrix is not positive definite (leading minor {info} fails)")
    if low.diagonal().min() ** 2 <= thresh:
        raise NotPositiveDefinite("Cholesky pivot below tolerance")
    return low


def _trsolve(low: np.ndarray, rhs: np.ndarray, trans: int = 0) -> np.ndarray:
    x, info = lapack.dtrtrs(low, rhs, lower=1, trans=trans)
    if info != 0:
        raise NotPositiveDefinite("singular triangular factor")
    return x


def cholesky(s, pivot_tol: float = PIVOT_TOL) -> SpdFactor:
    """Cholesky factor of a symmetric positive definite matrix.

    Raises NotPositiveDefinite when any pivot ``L[i, i]**2`` is at or below
    ``pivot_tol * max(diag(S))``.
    """
    return SpdFactor(_chol(as_sym(s), pivot_tol))


def solve_spd(f: SpdFactor, rhs) -> np.ndarray:
    """Solve ``(L L^T) X = rhs`` with two triangular solves."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != f.n:
        raise DimensionMismatch(f"rhs has {rhs.shape[0]} rows, factor has dimension {f.n}")
    return _trsolve(f.lower, _trsolve(f.lower, rhs), trans=1)


def sym_generalized_eig(a, s, subset: tuple[int, int] | None = None) -> EigenDecomp:
    """Eigenpairs of ``A v = lam S v`` with S SPD, ascending.

    The pencil is reduced by congruence with the Cholesky factor of S,
    ``C = L^-1 A L^-T``, and C is handed to a dense symmetric eigensolver.
    Eigenvectors are returned S-orthonormal. ``subset=(lo, hi)`` restricts
    the output to the inclusive 0-based index range.
    """
    a = as_sym(a)
    s = as_sym(s)
    if a.shape != s.shape:
        raise DimensionMismatch(f"A is {a.shape}, S is {s.shape}")
    return _geig(a, s, subset)


def _geig(a: np.ndarray, s: np.ndarray, subset=None, vectors: bool = True) -> EigenDecomp:
    # unvalidated path: a, s symmetric, same shape
    low = _chol(s)
    c = _trsolve(low, _trsolve(low, a).T)
    c = 0.5 * (c + c.T)
    n = c.shape[0]
    lo, hi = (0, n - 1) if subset is None else subset
    if lo == 0 and hi == n - 1:
        w, z, _, _, info = lapack.dsyevr(c, compute_v=int(vectors), range="A", lower=1)
    else:
        w, z, _, _, info = lapack.dsyevr(c, compute_v=int(vectors), range="I", lower=1, il=lo + 1, iu=hi + 1)
    if info != 0:
        raise ArithmeticError(f"symmetric eigensolver failed (info={info})")
    m = hi - lo + 1
    w = w[:m]
    if not vectors:
        return EigenDecomp(w, None)
    return EigenDecomp(w, _trsolve(low, z[:, :m], trans=1))


def rayleigh_quotient(a, s, v) -> float:
    """``(v^T A v) / (v^T S v)``."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise ZeroVector("Rayleigh quotient of the zero vector")
    a = as_sym(a)
    s = as_sym(s)
    return float(v @ a @ v) / float(v @ s @ v)
