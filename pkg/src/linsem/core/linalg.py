"""Dense linear algebra helpers: normal-equation solves and cosine geometry."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from linsem.core.errors import (
    InvalidParameterError,
    RankDeficientError,
    ShapeMismatchError,
    ZeroNormError,
)
from linsem.core.types import FloatArray, as_matrix

__all__ = [
    "NormalEquationSolver",
    "abs_cosine_matrix",
    "column_norms",
    "normalize_columns",
]

_linalg_logger = logging.getLogger("linsem.core.linalg")


@dataclass(frozen=True)
class NormalEquationSolver:
    """A factorized normal matrix ``XᵀX + ridge·I`` reusable across right-hand sides.

    The factorization is a column-pivoted QR, so the numerical rank is read off the
    diagonal of R and singular systems are refused instead of silently solved.

    :param q: The orthogonal factor.
    :param r: The upper triangular factor.
    :param pivots: The column permutation.
    :param design: The design matrix X the factorization belongs to.
    :param ridge: The ridge added to the diagonal.
    """

    q: FloatArray
    r: FloatArray
    pivots: np.ndarray
    design: FloatArray
    ridge: float

    @classmethod
    def factorize(cls, design: FloatArray, ridge: float = 0.0) -> NormalEquationSolver:
        """Factorize the normal matrix of a design matrix.

        :param design: The N×d design matrix.
        :param ridge: A non-negative ridge. Zero requires N > d and full column rank.
        :raises RankDeficientError: If ridge is zero and N <= d, or the normal matrix is
            numerically singular.
        """
        design = as_matrix(design, "design matrix")
        n, d = design.shape
        if ridge < 0:
            raise InvalidParameterError(f"ridge must be non-negative, got {ridge}")
        if ridge == 0 and n <= d:
            raise RankDeficientError(min(n, d), d, samples=n)

        normal = design.T @ design
        normal = (normal + normal.T) / 2
        if ridge:
            normal[np.diag_indices(d)] += ridge

        q, r, pivots = scipy.linalg.qr(normal, pivoting=True)
        diagonal = np.abs(np.diag(r))
        tolerance = max(d, 1) * np.finfo(np.float64).eps * (diagonal[0] if d else 0.0)
        rank = int(np.sum(diagonal > tolerance))
        if rank < d or diagonal[0] == 0:
            raise RankDeficientError(rank, d)

        _linalg_logger.debug(f"Factorized {d}x{d} normal matrix with ridge {ridge}")
        return cls(q=q, r=r, pivots=pivots, design=design, ridge=float(ridge))

    @property
    def dim(self) -> int:
        return self.r.shape[0]

    def solve_normal(self, rhs: FloatArray) -> FloatArray:
        """Solve ``(XᵀX + ridge·I) x = rhs`` for a d-vector or d×k matrix ``rhs``."""
        z = scipy.linalg.solve_triangular(self.r, self.q.T @ rhs, lower=False)
        solution = np.empty_like(z)
        solution[self.pivots] = z
        return solution

    def solve(self, targets: FloatArray) -> FloatArray:
        """Regression coefficients ``(XᵀX + ridge·I)⁻¹ Xᵀ Y``.

        :param targets: An N-vector or N×k matrix Y.
        """
        if targets.shape[0] != self.design.shape[0]:
            raise ShapeMismatchError(
                f"targets have {targets.shape[0]} rows, design has {self.design.shape[0]}"
            )
        return self.solve_normal(self.design.T @ targets)


def column_norms(matrix: FloatArray) -> FloatArray:
    """Euclidean norm of every column."""
    return np.linalg.norm(matrix, axis=0)


def normalize_columns(matrix: FloatArray, what: str = "column") -> FloatArray:
    """Scale every column to unit length.

    :raises ZeroNormError: If a column is exactly zero.
    """
    norms = column_norms(matrix)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroNormError(what, zero.tolist())
    return matrix / norms


def abs_cosine_matrix(a: FloatArray, b: FloatArray) -> FloatArray:
    """``|cos|`` between every column of ``a`` (d×P) and every column of ``b`` (d×Q)."""
    a = as_matrix(a, "first vector set")
    b = as_matrix(b, "second vector set")
    if a.shape[0] != b.shape[0]:
        raise ShapeMismatchError(
            f"vector sets live in different dimensions: {a.shape[0]} vs {b.shape[0]}"
        )
    similarity = np.abs(normalize_columns(a).T @ normalize_columns(b))
    return np.minimum(similarity, 1.0)
