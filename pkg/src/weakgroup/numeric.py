"""Dense complex linear algebra primitives.

Matrices are plain two-dimensional ``numpy`` arrays of dtype ``complex128``.
Every rank decision goes through :func:`numerical_rank` and every identity
check through :meth:`NumericContext.close`, so a single context object
controls all thresholds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InputError, NotComplementary, ShapeMismatch, Singular

EPS = np.finfo(float).eps


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Validate ``M`` and return it as a 2-D complex array."""
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be two-dimensional, got ndim={arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def fro(M: np.ndarray) -> float:
    return float(np.linalg.norm(M)) if M.size else 0.0


def ctranspose(M: np.ndarray) -> np.ndarray:
    return M.conj().T


@dataclass(frozen=True)
class NumericContext:
    """Tolerances shared by rank decisions and identity checks.

    ``rank_rtol=None`` means ``max(rows, cols) * eps`` of the matrix being
    ranked; ``max_index=None`` means the dimension of the matrix.
    ``index_rtol`` is the cutoff, relative to ``|A|_2``, for the rank of each
    power during index search.  Ranges of powers are only determined to the
    conditioning of the nilpotent chains, so this cutoff sits well above
    rounding level.
    """

    rank_rtol: Optional[float] = None
    eq_rtol: float = 1e-8
    eq_atol: float = 1e-12
    max_index: Optional[int] = None
    index_rtol: float = 1e-10

    def __post_init__(self):
        if self.rank_rtol is not None and self.rank_rtol < 0:
            raise InputError("rank_rtol must be nonnegative")
        if self.eq_rtol < 0 or self.eq_atol < 0 or self.index_rtol < 0:
            raise InputError("eq_rtol, eq_atol and index_rtol must be nonnegative")
        if self.max_index is not None and self.max_index < 1:
            raise InputError("max_index must be at least 1")

    def rank_cutoff(self, shape) -> float:
        if self.rank_rtol is not None:
            return self.rank_rtol
        return max(shape) * EPS

    def index_cap(self, n: int) -> int:
        return self.max_index if self.max_index is not None else max(n, 1)

    def close(self, X, Y) -> bool:
        diff = fro(np.asarray(X) - np.asarray(Y))
        return diff <= self.eq_atol + self.eq_rtol * (1.0 + fro(X) + fro(Y))

    def negligible(self, V, scale: float = 0.0) -> bool:
        """True when ``V`` is zero relative to the magnitude ``scale`` of its factors."""
        return fro(V) <= self.eq_atol + self.eq_rtol * (1.0 + scale)


def residual(X, Y) -> float:
    """Relative Frobenius distance ``|X - Y| / (1 + |X| + |Y|)``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    return fro(X - Y) / (1.0 + fro(X) + fro(Y))


def zero_residual(V, scale: float = 0.0) -> float:
    return fro(V) / (1.0 + scale)


DEFAULT_CONTEXT = NumericContext()


def _orient(frame: np.ndarray, atol: float) -> np.ndarray:
    # first entry above atol in each column becomes real positive
    frame = frame.copy()
    for j in range(frame.shape[1]):
        col = frame[:, j]
        big = np.flatnonzero(np.abs(col) > atol)
        if big.size:
            pivot = col[big[0]]
            frame[:, j] = col * (abs(pivot) / pivot)
            frame[big[0], j] = abs(pivot)
    return frame


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal column frame of a subspace of ``C^ambient_dim``."""

    ambient_dim: int
    frame: np.ndarray

    def __post_init__(self):
        frame = np.asarray(self.frame, dtype=complex)
        if frame.ndim != 2 or frame.shape[0] != self.ambient_dim:
            raise ShapeMismatch(
                f"frame of shape {frame.shape} does not live in C^{self.ambient_dim}")
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @classmethod
    def from_frame(cls, frame, ctx: NumericContext = DEFAULT_CONTEXT) -> "SubspaceBasis":
        """Wrap an already orthonormal frame, applying the orientation convention."""
        frame = as_matrix(frame, "frame")
        return cls(frame.shape[0], _orient(frame, ctx.eq_atol))

    @classmethod
    def full(cls, n: int) -> "SubspaceBasis":
        return cls(n, np.eye(n, dtype=complex))

    @classmethod
    def zero(cls, n: int) -> "SubspaceBasis":
        return cls(n, np.zeros((n, 0), dtype=complex))


def _svd(M: np.ndarray):
    return np.linalg.svd(M, full_matrices=True)


def _rank_from_singular_values(s: np.ndarray, shape, ctx: NumericContext,
                               scale: Optional[float] = None,
                               rtol: Optional[float] = None) -> int:
    ref = s[0] if scale is None and s.size else scale
    if s.size == 0 or not ref:
        return 0
    if rtol is None:
        rtol = ctx.rank_cutoff(shape)
    return int(np.count_nonzero(s > rtol * ref))


def numerical_rank(M, ctx: NumericContext = DEFAULT_CONTEXT,
                   scale: Optional[float] = None) -> int:
    """Number of singular values above ``rank_cutoff * scale``.

    ``scale`` defaults to the largest singular value of ``M``.  Callers that
    know the magnitude ``M`` was computed at (``|A|`` for ``A Q``) pass it so
    that rounding noise is judged against the right reference.
    """
    M = as_matrix(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return _rank_from_singular_values(s, M.shape, ctx, scale)


def moore_penrose(M, ctx: NumericContext = DEFAULT_CONTEXT,
                  rtol: Optional[float] = None) -> np.ndarray:
    """Pseudoinverse from the SVD, singular values under the rank cutoff set to zero."""
    M = as_matrix(M)
    m, n = M.shape
    if M.size == 0:
        return np.zeros((n, m), dtype=complex)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    r = _rank_from_singular_values(s, M.shape, ctx, rtol=rtol)
    return (ctranspose(Vh[:r]) / s[:r]) @ ctranspose(U[:, :r])


def range_basis(M, ctx: NumericContext = DEFAULT_CONTEXT,
                scale: Optional[float] = None,
                rtol: Optional[float] = None) -> SubspaceBasis:
    """Oriented orthonormal frame of ``R(M)``; ``scale``/``rtol`` as in the rank cutoff."""
    M = as_matrix(M)
    m = M.shape[0]
    if M.size == 0:
        return SubspaceBasis.zero(m)
    U, s, _ = _svd(M)
    r = _rank_from_singular_values(s, M.shape, ctx, scale, rtol)
    return SubspaceBasis(m, _orient(U[:, :r], ctx.eq_atol))


def null_basis(M, ctx: NumericContext = DEFAULT_CONTEXT,
               rtol: Optional[float] = None) -> SubspaceBasis:
    """Orthonormal frame of ``N(M)``, the orthogonal complement of ``R(M^*)``."""
    M = as_matrix(M)
    n = M.shape[1]
    if M.size == 0:
        return SubspaceBasis.full(n)
    _, s, Vh = _svd(M)
    r = _rank_from_singular_values(s, M.shape, ctx, rtol=rtol)
    return SubspaceBasis(n, _orient(ctranspose(Vh[r:]), ctx.eq_atol))


def complement_basis(B: SubspaceBasis, ctx: NumericContext = DEFAULT_CONTEXT) -> SubspaceBasis:
    n, k = B.ambient_dim, B.dim
    if k > n:
        raise ShapeMismatch("frame has more columns than its ambient dimension")
    if k == 0:
        return SubspaceBasis.full(n)
    Q, _ = np.linalg.qr(B.frame, mode="complete")
    return SubspaceBasis(n, _orient(Q[:, k:], ctx.eq_atol))


def orthogonal_projector(B: SubspaceBasis) -> np.ndarray:
    return B.frame @ ctranspose(B.frame)


def oblique_projector(L: SubspaceBasis, M: SubspaceBasis,
                      ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    """Idempotent with range ``L`` and null space ``M``.

    Solves ``P [L | M] = [L | 0]`` against the concatenated frame.
    """
    if L.ambient_dim != M.ambient_dim:
        raise ShapeMismatch("subspaces live in different ambient spaces")
    n = L.ambient_dim
    if L.dim + M.dim != n:
        raise NotComplementary(
            f"dimensions {L.dim} + {M.dim} do not add up to {n}")
    F = np.hstack([L.frame, M.frame])
    if numerical_rank(F, ctx) < n:
        raise NotComplementary("subspaces intersect nontrivially")
    G = np.hstack([L.frame, np.zeros_like(M.frame)])
    return np.linalg.solve(F.T, G.T).T


def invert(M, ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    M = as_matrix(M)
    n, m = M.shape
    if n != m:
        raise ShapeMismatch(f"cannot invert a {n}x{m} matrix")
    if n == 0:
        return M.copy()
    if numerical_rank(M, ctx) < n:
        raise Singular(f"matrix is numerically singular (n={n})")
    return np.linalg.solve(M, np.eye(n, dtype=complex))


def principal_angle_gap(X: SubspaceBasis, Y: SubspaceBasis) -> float:
    """Sine of the largest principal angle between two equidimensional subspaces."""
    if X.dim != Y.dim:
        return 1.0
    if X.dim == 0:
        return 0.0
    # |(I - P_Y) X| is the sine of the largest angle
    resid = X.frame - Y.frame @ (ctranspose(Y.frame) @ X.frame)
    return float(np.linalg.norm(resid, 2))
