"""Dense square LU factorization with partial pivoting.

One factorization serves solves against both the matrix and its transpose,
which is what the pivot loop needs: the expansion coefficients come from a
transpose solve and the iterate update from a plain solve, both on the same
base matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from facetlp.errors import DimensionMismatch, SingularMatrix

TOL_PIVOT = 1e-12
NEAR_SINGULAR_FACTOR = 1e3


@dataclass(frozen=True)
class SquareFactorization:
    """Packed LU factors of a d-by-d matrix, immutable after construction."""

    dimension: int
    lu: np.ndarray
    piv: np.ndarray
    singular: bool
    near_singular: bool
    pivot_tolerance: float
    bad_pivot_index: int | None = None

    def solve(self, r: np.ndarray) -> np.ndarray:
        return solve(self, r)

    def solve_transpose(self, r: np.ndarray) -> np.ndarray:
        return solve_transpose(self, r)


def factor(m: np.ndarray) -> SquareFactorization:
    """LU-factor a square matrix with row pivoting.

    Exactly or nearly singular input does not raise here; the condition is
    recorded and the solves refuse to run. Factorization is deterministic:
    identical input bits give identical factors and permutation.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    d = m.shape[0]
    norm = np.max(np.abs(m).sum(axis=1)) if d else 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(m, check_finite=True)
    pivots = np.abs(np.diag(lu))
    threshold = TOL_PIVOT * max(norm, np.finfo(float).tiny)
    bad = np.flatnonzero(pivots <= threshold)
    singular = bad.size > 0
    near = bool(not singular and np.any(pivots <= NEAR_SINGULAR_FACTOR * threshold))
    return SquareFactorization(
        dimension=d,
        lu=lu,
        piv=piv,
        singular=singular,
        near_singular=near,
        pivot_tolerance=TOL_PIVOT,
        bad_pivot_index=int(bad[0]) if singular else None,
    )


def _check(f: SquareFactorization, r: np.ndarray) -> np.ndarray:
    if f.singular:
        raise SingularMatrix(
            f"matrix is singular (pivot {f.bad_pivot_index})", f.bad_pivot_index
        )
    r = np.asarray(r, dtype=float)
    if r.shape != (f.dimension,):
        raise DimensionMismatch(
            f"right-hand side has shape {r.shape}, expected ({f.dimension},)"
        )
    return r


def solve(f: SquareFactorization, r: np.ndarray) -> np.ndarray:
    """Solve M x = r from the stored factors."""
    r = _check(f, r)
    return scipy.linalg.lu_solve((f.lu, f.piv), r, trans=0, check_finite=False)


def solve_transpose(f: SquareFactorization, r: np.ndarray) -> np.ndarray:
    """Solve M^T y = r from the same factors (no refactorization)."""
    r = _check(f, r)
    return scipy.linalg.lu_solve((f.lu, f.piv), r, trans=1, check_finite=False)
