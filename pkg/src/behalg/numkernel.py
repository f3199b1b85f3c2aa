"""Tolerant numerical rank, null-space bases, and subspace comparison.

Every rank or kernel decision in the package funnels through this module, so
all algorithms share a single notion of "numerically zero".  The thresholding
rule is the usual SVD one: a singular value counts as nonzero when it exceeds

    max(rel_rank_tol * sigma_max * max(rows, cols), abs_floor).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

# Gram-matrix deviation accepted before a basis stops counting as orthonormal.
_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds that govern every numeric decision in the package.

    Attributes
    ----------
    rel_rank_tol : float
        Relative singular-value cutoff, scaled by sigma_max and the larger
        matrix dimension.
    abs_floor : float
        Absolute cutoff that catches matrices which are zero to machine
        precision.
    subspace_eq_tol : float
        Two subspaces are considered equal when the sine of their largest
        principal angle is at most this value.
    degree_trim_tol : float
        Trailing polynomial coefficients below this fraction of the largest
        coefficient are trimmed.
    """

    rel_rank_tol: float = 1e-10
    abs_floor: float = 1e-14
    subspace_eq_tol: float = 1e-8
    degree_trim_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rel_rank_tol", "abs_floor", "subspace_eq_tol", "degree_trim_tol"):
            value = getattr(self, name)
            if not (value > 0):
                raise InvalidInputError(f"{name} must be strictly positive, got {value!r}")
        if self.rel_rank_tol >= 1:
            raise InvalidInputError("rel_rank_tol must be below 1")
        if self.subspace_eq_tol >= 1:
            raise InvalidInputError("subspace_eq_tol must be below 1")


DEFAULT_CONFIG = ToleranceConfig()


def _as_matrix(M, allow_empty: bool = False) -> np.ndarray:
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError(f"expected a 2-D array, got ndim={A.ndim}")
    if not allow_empty and min(A.shape) == 0:
        raise InvalidInputError(f"matrix must have at least one row and column, got shape {A.shape}")
    if A.size and not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix contains non-finite entries")
    return A


def _svd_threshold(s: np.ndarray, shape: tuple[int, int], cfg: ToleranceConfig) -> float:
    if s.size == 0:
        return cfg.abs_floor
    return max(cfg.rel_rank_tol * s[0] * max(shape), cfg.abs_floor)


def numerical_rank(M, cfg: ToleranceConfig = DEFAULT_CONFIG) -> int:
    """Rank of ``M`` under the shared singular-value threshold."""
    A = _as_matrix(M)
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.count_nonzero(s > _svd_threshold(s, A.shape, cfg)))


def right_null_basis(M, cfg: ToleranceConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Orthonormal columns spanning the numerical kernel of ``M``.

    The returned matrix has shape (cols, cols - rank); columns are right
    singular vectors whose singular values fall below the rank threshold.
    """
    A = _as_matrix(M)
    _, s, Vt = np.linalg.svd(A, full_matrices=True)
    thr = _svd_threshold(s, A.shape, cfg)
    r = int(np.count_nonzero(s > thr))
    return Vt[r:].T.copy()


def left_null_basis(M, cfg: ToleranceConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Orthonormal rows y with y @ M numerically zero; shape (rows - rank, rows)."""
    return right_null_basis(_as_matrix(M).T, cfg).T.copy()


def column_space_basis(M, cfg: ToleranceConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Orthonormal basis of the column space; tolerates empty matrices."""
    A = _as_matrix(M, allow_empty=True)
    if min(A.shape) == 0:
        return np.zeros((A.shape[0], 0))
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    r = int(np.count_nonzero(s > _svd_threshold(s, A.shape, cfg)))
    return U[:, :r].copy()


def _check_orthonormal(B: np.ndarray, which: str) -> None:
    if B.shape[1] == 0:
        return
    gram = B.T @ B
    dev = np.max(np.abs(gram - np.eye(B.shape[1])))
    if dev > _ORTHO_TOL:
        raise InvalidInputError(
            f"{which} basis is not orthonormal (Gram deviation {dev:.3e})"
        )


def subspace_distance(B1, B2) -> float:
    """Sine of the largest principal angle between the spans of ``B1`` and ``B2``.

    Both arguments must have orthonormal columns and the same number of rows.
    Subspaces of different dimension are at distance 1 by convention.  The
    value is computed as the spectral norm of the difference of the two
    orthogonal projectors, which is an exact metric on subspaces.
    """
    A = _as_matrix(B1, allow_empty=True)
    B = _as_matrix(B2, allow_empty=True)
    if A.shape[0] != B.shape[0]:
        raise InvalidInputError(
            f"bases live in different ambient spaces: {A.shape[0]} vs {B.shape[0]} rows"
        )
    _check_orthonormal(A, "first")
    _check_orthonormal(B, "second")
    if A.shape[1] != B.shape[1]:
        return 1.0
    if A.shape[1] == 0:
        return 0.0
    gap = A @ A.T - B @ B.T
    return float(min(1.0, np.linalg.norm(gap, 2)))


def sign_normalize(vec) -> np.ndarray:
    """Scale to unit Euclidean norm and make the first largest-magnitude entry positive.

    The canonical form applied to every polynomial coefficient vector that
    comes out of a null-space computation, so representations are reproducible
    across runs and platforms.
    """
    v = np.asarray(vec, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError("sign_normalize expects a 1-D vector")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return v.copy()
    v = v / norm
    mags = np.abs(v)
    lead = int(np.argmax(mags >= mags.max() * (1.0 - 1e-12)))
    if v[lead] < 0:
        v = -v
    return v
