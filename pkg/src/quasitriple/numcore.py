"""
Dense complex linear algebra over weighted inner-product spaces.

Every inner product in the package is carried by a Gram matrix ``W``::

    (x, y) = y^H W x

so adjoints are always taken with respect to the Gram matrices of the two
spaces involved (see :func:`weighted_adjoint`).  Solves go through LU with
partial pivoting plus a LAPACK reciprocal-condition estimate; rank and null
space decisions go through the SVD; generalized eigenvalues through QZ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

#: relative singular-value threshold for rank / null space decisions
RANK_TOL = 1e-10
#: reciprocal condition below which :func:`solve` refuses to answer
SOLVE_RCOND = 1e-14


class ShapeError(ValueError):
    """Operand shapes are inconsistent."""


class SingularMatrixError(np.linalg.LinAlgError):
    """A matrix is singular or numerically singular.

    The reciprocal condition estimate is kept in :attr:`rcond`.
    """

    def __init__(self, message: str, rcond: float = 0.0):
        super().__init__(f"{message} (rcond={rcond:.3e})")
        self.rcond = float(rcond)


class ConvergenceError(np.linalg.LinAlgError):
    """An iterative LAPACK driver did not converge."""


def as_matrix(a, rows: int | None = None, cols: int | None = None, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex array, optionally checking its shape."""
    arr = np.array(a, dtype=np.complex128)
    if arr.ndim == 1 and cols == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ShapeError(f"{name}: expected a 2-D array, got ndim={arr.ndim}")
    if rows is not None and arr.shape[0] != rows:
        raise ShapeError(f"{name}: expected {rows} rows, got {arr.shape[0]}")
    if cols is not None and arr.shape[1] != cols:
        raise ShapeError(f"{name}: expected {cols} columns, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: entries must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class WeightedSpace:
    """A finite-dimensional complex Hilbert space ``C^dim`` with Gram matrix ``gram``."""

    dim: int
    gram: np.ndarray

    def __post_init__(self):
        gram = as_matrix(self.gram, self.dim, self.dim, name="gram")
        scale = np.linalg.norm(gram) if self.dim else 0.0
        if np.linalg.norm(gram - gram.conj().T) > 1e-14 * scale:
            raise ValueError("gram matrix is not Hermitian")
        if self.dim and np.linalg.eigvalsh(gram).min() <= 0.0:
            raise ValueError("gram matrix is not positive definite")
        gram.setflags(write=False)
        object.__setattr__(self, "gram", gram)

    @classmethod
    def euclidean(cls, dim: int) -> "WeightedSpace":
        return cls(dim, np.eye(dim))

    @classmethod
    def diagonal(cls, weights) -> "WeightedSpace":
        w = np.asarray(weights, dtype=float)
        return cls(w.size, np.diag(w))

    def inner(self, x, y) -> complex:
        """``(x, y) = y^H W x``, linear in the first argument."""
        return complex(np.vdot(y, self.gram @ x))

    def norm(self, x) -> float:
        return float(np.sqrt(max(self.inner(x, x).real, 0.0)))

    def cholesky(self) -> np.ndarray:
        """Lower factor ``L`` with ``W = L L^H``."""
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.complex128)
        return np.linalg.cholesky(self.gram)

    @property
    def is_euclidean(self) -> bool:
        return bool(np.array_equal(self.gram, np.eye(self.dim)))


def weighted_adjoint(a, w_out: WeightedSpace, w_in: WeightedSpace) -> np.ndarray:
    """Adjoint of ``a: (C^n, w_in) -> (C^m, w_out)``.

    Returns ``B = W_in^{-1} A^H W_out`` so that ``(A x, y)_out = (x, B y)_in``.
    """
    a = as_matrix(a, w_out.dim, w_in.dim, name="A")
    rhs = a.conj().T @ w_out.gram
    if w_in.is_euclidean:
        return rhs
    return sla.cho_solve(sla.cho_factor(w_in.gram), rhs)


class LUSolver:
    """LU factorization of a square matrix with a reciprocal 1-norm condition estimate.

    Raises :class:`SingularMatrixError` on construction when the estimate
    falls below ``min_rcond``.
    """

    def __init__(self, a, min_rcond: float = SOLVE_RCOND):
        a = as_matrix(a, name="A")
        if a.shape[0] != a.shape[1]:
            raise ShapeError(f"A must be square, got {a.shape}")
        self.shape = a.shape
        n = a.shape[0]
        if n == 0:
            self.rcond = 1.0
            self._lu = None
            return
        anorm = np.abs(a).sum(axis=0).max()
        if anorm == 0.0:
            raise SingularMatrixError("matrix is zero", 0.0)
        lu, piv, info = lapack.zgetrf(a)
        if info > 0:
            raise SingularMatrixError("exactly singular pivot", 0.0)
        rcond, info = lapack.zgecon(lu, anorm, norm="1")
        self.rcond = float(rcond)
        if not self.rcond >= min_rcond:
            raise SingularMatrixError("matrix is numerically singular", self.rcond)
        self._lu = (lu, piv)

    @property
    def condition(self) -> float:
        return 1.0 / self.rcond if self.rcond > 0 else np.inf

    def solve(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=np.complex128)
        vec = b.ndim == 1
        b2 = b.reshape(-1, 1) if vec else b
        if b2.shape[0] != self.shape[0]:
            raise ShapeError(f"rhs has {b2.shape[0]} rows, expected {self.shape[0]}")
        if self._lu is None:
            x = np.zeros_like(b2)
        else:
            x, info = lapack.zgetrs(self._lu[0], self._lu[1], b2)
        return x.ravel() if vec else x


def solve(a, b, min_rcond: float = SOLVE_RCOND) -> np.ndarray:
    """Solve ``A x = b`` column-wise; numerically singular ``A`` raises."""
    return LUSolver(a, min_rcond=min_rcond).solve(b)


def singular_values(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.size == 0:
        return np.zeros(0)
    return sla.svdvals(a)


def rank(a, tol: float = RANK_TOL) -> int:
    """Numerical rank: singular values above ``tol * sigma_max``."""
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def null_basis(a, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal (Euclidean) basis of the numerical null space, as columns."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise ShapeError("null_basis expects a 2-D array")
    cols = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(cols, dtype=np.complex128)
    _, s, vh = sla.svd(a, full_matrices=True)
    r = int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return vh[r:].conj().T.copy()


@dataclass(frozen=True)
class PencilSpectrum:
    """Generalized eigenvalues of a pencil ``(A, E)``."""

    finite: np.ndarray
    n_infinite: int
    vectors: np.ndarray | None = None


def pencil_eigenvalues(a, e, vectors: bool = False, inf_tol: float = 1e-12) -> PencilSpectrum:
    """Eigenvalues ``lambda`` of ``det(A - lambda E) = 0`` via QZ.

    Eigenvalues whose homogeneous coordinate ``beta`` is negligible
    relative to ``alpha`` (scaled by the pencil norms) are counted as
    infinite. Finite eigenvalues are sorted by (real, imag).
    """
    a = as_matrix(a, name="A")
    e = as_matrix(e, *a.shape, name="E")
    if a.shape[0] != a.shape[1]:
        raise ShapeError("pencil matrices must be square")
    if a.shape[0] == 0:
        return PencilSpectrum(np.zeros(0, complex), 0, np.zeros((0, 0), complex) if vectors else None)
    try:
        out = sla.eig(a, e, right=vectors, homogeneous_eigvals=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"QZ iteration failed: {exc}") from exc
    w, v = (out if vectors else (out, None))
    alpha, beta = w[0], w[1]
    na = np.linalg.norm(a, 1)
    ne = np.linalg.norm(e, 1)
    fin = np.abs(beta) * na > inf_tol * np.abs(alpha) * max(ne, 1e-300)
    lam = alpha[fin] / beta[fin]
    order = np.lexsort((lam.imag, lam.real))
    vecs = None
    if vectors:
        vecs = v[:, fin][:, order]
    return PencilSpectrum(lam[order], int(np.count_nonzero(~fin)), vecs)


def relative_defect(lhs, rhs, *operands) -> float:
    """``||lhs - rhs||_F`` divided by the largest Frobenius norm among all operands."""
    diff = np.linalg.norm(np.asarray(lhs) - np.asarray(rhs))
    scale = max([np.linalg.norm(lhs), np.linalg.norm(rhs)] + [np.linalg.norm(x) for x in operands])
    if scale == 0.0:
        return 0.0
    return float(diff / scale)
