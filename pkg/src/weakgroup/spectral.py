"""Index, Drazin-type inverses and the canonical block form of a pair (A, W).

For ``A`` of shape ``m x n`` and a weight ``W`` of shape ``n x m`` the
canonical form splits ``C^n = R((WA)^d) + N[((WA)^d)^*]`` (frames ``p1, p2``)
and ``C^m = R((AW)^d) + N[((AW)^d)^*]`` (frames ``q1, q2``).  In these
orthogonal splittings

    A = [[A1, A2], [0, A3]] : C^n -> C^m,
    W = [[W1, W2], [0, W3]] : C^m -> C^n,

with ``A1, W1`` invertible and ``A3 W3``, ``W3 A3`` nilpotent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DecompositionFailure, IndexOverflow, ShapeMismatch, Singular, ZeroWeight
from .numeric import (
    DEFAULT_CONTEXT,
    NumericContext,
    SubspaceBasis,
    as_matrix,
    complement_basis,
    ctranspose,
    fro,
    invert,
    moore_penrose,
    numerical_rank,
    range_basis,
)


@dataclass(frozen=True)
class IndexResult:
    """Index ``k`` of a square matrix, ``rank(A^k)`` and a frame of ``R(A^k)``."""

    index: int
    stable_rank: int
    range: SubspaceBasis


def _require_square(A, name="A"):
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {A.shape[0]}x{A.shape[1]}")
    return A


def check_pair(A, W, ctx: NumericContext = DEFAULT_CONTEXT):
    """Validate shapes of a pair and that the weight is nonzero."""
    A = as_matrix(A, "A")
    W = as_matrix(W, "W")
    if W.shape != (A.shape[1], A.shape[0]):
        raise ShapeMismatch(
            f"W must be {A.shape[1]}x{A.shape[0]} for A of shape "
            f"{A.shape[0]}x{A.shape[1]}, got {W.shape[0]}x{W.shape[1]}")
    if fro(W) <= ctx.eq_atol:
        raise ZeroWeight("the weight W is numerically zero")
    return A, W


def index(A, ctx: NumericContext = DEFAULT_CONTEXT) -> IndexResult:
    """Smallest k with rank(A^(k+1)) = rank(A^k).

    The range of each power is carried as an orthonormal frame ``Q_j`` and
    advanced by one multiplication, ``R(A^(j+1)) = R(A Q_j)``; ranks use
    ``ctx.index_rtol`` against the spectral norm of ``A``, the scale at which
    each step is computed.  Raw powers would let a contracting core sink
    below the rounding noise of ``A^k``.
    """
    A = _require_square(A)
    n = A.shape[0]
    cap = ctx.index_cap(n)
    scale = float(np.linalg.norm(A, 2)) if n else 0.0
    frame = SubspaceBasis.full(n)
    for k in range(cap + 1):
        nxt = range_basis(A @ frame.frame, ctx, scale=scale, rtol=ctx.index_rtol)
        if nxt.dim == frame.dim:
            return IndexResult(k, frame.dim, frame)
        frame = nxt
    raise IndexOverflow(f"rank sequence did not stabilize within {cap} powers")


def drazin(A, ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    """Drazin inverse as the outer inverse with range ``R(A^k)`` and null space ``N(A^k)``.

    ``A^d = U (V^* A U)^(-1) V^*`` where ``U`` spans ``R(A^k)`` and ``V``
    spans ``R((A^*)^k) = N(A^k)^perp``.
    """
    A = _require_square(A)
    ind = index(A, ctx)
    if ind.stable_rank == 0:
        return np.zeros_like(A)
    U = ind.range.frame
    V = index(ctranspose(A), ctx).range.frame
    if V.shape[1] != U.shape[1]:
        raise DecompositionFailure("ranks of A^k and (A^*)^k disagree")
    core = ctranspose(V) @ A @ U
    try:
        return U @ invert(core, ctx) @ ctranspose(V)
    except Singular as exc:
        raise DecompositionFailure(f"core of the Drazin inverse is singular: {exc}") from exc


def drazin_power_formula(A, ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    """``A^k (A^(2k+1))^+ A^k``; reliable only for well-conditioned small inputs."""
    A = _require_square(A)
    k = index(A, ctx).index
    Ak = np.linalg.matrix_power(A, k)
    return Ak @ moore_penrose(Ak @ A @ Ak, ctx) @ Ak


@dataclass(frozen=True)
class CanonicalPair:
    p1: SubspaceBasis
    p2: SubspaceBasis
    q1: SubspaceBasis
    q2: SubspaceBasis
    A1: np.ndarray
    A2: np.ndarray
    A3: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    T: np.ndarray
    U: np.ndarray

    @property
    def core_dim(self) -> int:
        return self.q1.dim

    @property
    def P(self) -> np.ndarray:
        return np.hstack([self.p1.frame, self.p2.frame])

    @property
    def Q(self) -> np.ndarray:
        return np.hstack([self.q1.frame, self.q2.frame])

    def assemble_A(self) -> np.ndarray:
        return self.to_y_x(self.A1, self.A2, np.zeros((self.q2.dim, self.p1.dim)), self.A3)

    def assemble_W(self) -> np.ndarray:
        return self.to_x_y(self.W1, self.W2, np.zeros((self.p2.dim, self.q1.dim)), self.W3)

    def to_y_x(self, X11, X12=None, X21=None, X22=None) -> np.ndarray:
        """Map blocks of an operator C^n -> C^m (p-frames to q-frames) back to a matrix."""
        return _assemble(self.q1, self.q2, self.p1, self.p2, X11, X12, X21, X22)

    def to_x_y(self, X11, X12=None, X21=None, X22=None) -> np.ndarray:
        """Map blocks of an operator C^m -> C^n (q-frames to p-frames) back to a matrix."""
        return _assemble(self.p1, self.p2, self.q1, self.q2, X11, X12, X21, X22)

    def to_y_y(self, X11, X12=None, X21=None, X22=None) -> np.ndarray:
        return _assemble(self.q1, self.q2, self.q1, self.q2, X11, X12, X21, X22)

    def to_x_x(self, X11, X12=None, X21=None, X22=None) -> np.ndarray:
        return _assemble(self.p1, self.p2, self.p1, self.p2, X11, X12, X21, X22)

    def blocks_y_x(self, M):
        """Blocks of a matrix C^n -> C^m in the (p, q) frames: (M11, M12, M21, M22)."""
        return _blocks(self.q1, self.q2, self.p1, self.p2, M)

    def blocks_x_y(self, M):
        return _blocks(self.p1, self.p2, self.q1, self.q2, M)


def _assemble(out1, out2, in1, in2, X11, X12, X21, X22):
    def blk(X, r, c):
        return np.zeros((r, c), dtype=complex) if X is None else np.asarray(X, dtype=complex)

    r1, r2, c1, c2 = out1.dim, out2.dim, in1.dim, in2.dim
    M = np.block([[blk(X11, r1, c1), blk(X12, r1, c2)],
                  [blk(X21, r2, c1), blk(X22, r2, c2)]])
    Out = np.hstack([out1.frame, out2.frame])
    In = np.hstack([in1.frame, in2.frame])
    return Out @ M @ ctranspose(In)


def _blocks(out1, out2, in1, in2, M):
    o1, o2 = ctranspose(out1.frame), ctranspose(out2.frame)
    return (o1 @ M @ in1.frame, o1 @ M @ in2.frame,
            o2 @ M @ in1.frame, o2 @ M @ in2.frame)


def _nilpotent_series(core_inv: np.ndarray, coupling: np.ndarray, nil: np.ndarray) -> np.ndarray:
    # sum_{j>=0} core_inv^(j+2) coupling nil^j, finite because nil is nilpotent
    out = np.zeros_like(coupling)
    if coupling.size == 0:
        return out
    left = core_inv @ core_inv
    right = np.eye(nil.shape[0], dtype=complex)
    for _ in range(max(nil.shape[0], 1)):
        out = out + left @ coupling @ right
        left = left @ core_inv
        right = right @ nil
    return out


def series_TU(cp: CanonicalPair):
    """Correction terms ``T`` and ``U`` of the Drazin inverses of ``AW`` and ``WA``."""
    A1, A2, A3 = cp.A1, cp.A2, cp.A3
    W1, W2, W3 = cp.W1, cp.W2, cp.W3
    if A1.size == 0:
        return (np.zeros((0, cp.q2.dim), dtype=complex),
                np.zeros((0, cp.p2.dim), dtype=complex))
    T = _nilpotent_series(np.linalg.inv(A1 @ W1), A1 @ W2 + A2 @ W3, A3 @ W3)
    U = _nilpotent_series(np.linalg.inv(W1 @ A1), W1 @ A2 + W2 @ A3, W3 @ A3)
    return T, U


def _is_nilpotent(N: np.ndarray, scale: float, ctx: NumericContext) -> bool:
    n = N.shape[0]
    if n == 0:
        return True
    return ctx.negligible(np.linalg.matrix_power(N, n), scale ** n)


def canonical_pair(A, W, ctx: NumericContext = DEFAULT_CONTEXT) -> CanonicalPair:
    A, W = check_pair(A, W, ctx)
    m, n = A.shape
    AW = A @ W
    WA = W @ A
    q1 = index(AW, ctx).range
    p1 = index(WA, ctx).range
    if q1.dim != p1.dim:
        raise DecompositionFailure(
            f"core dimensions disagree: R((AW)^d) has {q1.dim}, R((WA)^d) has {p1.dim}")
    q2 = complement_basis(q1, ctx)
    p2 = complement_basis(p1, ctx)
    A1, A2, A4, A3 = _blocks(q1, q2, p1, p2, A)
    W1, W2, W4, W3 = _blocks(p1, p2, q1, q2, W)
    if not ctx.negligible(A4, fro(A)):
        raise DecompositionFailure(f"(2,1) block of A does not vanish: |A21| = {fro(A4):.3e}")
    if not ctx.negligible(W4, fro(W)):
        raise DecompositionFailure(f"(2,1) block of W does not vanish: |W21| = {fro(W4):.3e}")
    k = q1.dim
    if numerical_rank(A1, ctx) < k or numerical_rank(W1, ctx) < k:
        raise DecompositionFailure("core blocks A1 or W1 are singular")
    if not _is_nilpotent(A3 @ W3, fro(A3) * fro(W3), ctx):
        raise DecompositionFailure("A3 W3 is not nilpotent")
    if not _is_nilpotent(W3 @ A3, fro(A3) * fro(W3), ctx):
        raise DecompositionFailure("W3 A3 is not nilpotent")
    partial = CanonicalPair(p1, p2, q1, q2, A1, A2, A3, W1, W2, W3,
                            np.zeros((k, q2.dim), dtype=complex),
                            np.zeros((k, p2.dim), dtype=complex))
    T, U = series_TU(partial)
    return CanonicalPair(p1, p2, q1, q2, A1, A2, A3, W1, W2, W3, T, U)


def drazin_from_blocks(cp: CanonicalPair):
    """``(AW)^d`` and ``(WA)^d`` reassembled from the canonical blocks."""
    if cp.core_dim == 0:
        m, n = cp.q1.ambient_dim, cp.p1.ambient_dim
        return np.zeros((m, m), dtype=complex), np.zeros((n, n), dtype=complex)
    AWd = cp.to_y_y(np.linalg.inv(cp.A1 @ cp.W1), cp.T)
    WAd = cp.to_x_x(np.linalg.inv(cp.W1 @ cp.A1), cp.U)
    return AWd, WAd


def w_drazin_from_blocks(cp: CanonicalPair) -> np.ndarray:
    if cp.core_dim == 0:
        return cp.to_y_x(None)
    W1inv = np.linalg.inv(cp.W1)
    return cp.to_y_x(np.linalg.inv(cp.W1 @ cp.A1 @ cp.W1), W1inv @ cp.U)


def w_drazin(A, W, ctx: NumericContext = DEFAULT_CONTEXT, check: bool = True) -> np.ndarray:
    """W-weighted Drazin inverse ``[(AW)^d]^2 A``.

    With ``check`` the result is compared with ``A [(WA)^d]^2`` and with the
    block formula of the canonical form.
    """
    A, W = check_pair(A, W, ctx)
    AWd = drazin(A @ W, ctx)
    X = AWd @ AWd @ A
    if check:
        WAd = drazin(W @ A, ctx)
        if not ctx.close(X, A @ WAd @ WAd):
            raise DecompositionFailure("[(AW)^d]^2 A and A [(WA)^d]^2 disagree")
        if not ctx.close(X, w_drazin_from_blocks(canonical_pair(A, W, ctx))):
            raise DecompositionFailure("W-weighted Drazin inverse disagrees with its block form")
    return X


__all__ = [
    "CanonicalPair",
    "IndexResult",
    "canonical_pair",
    "check_pair",
    "drazin",
    "drazin_power_formula",
    "drazin_from_blocks",
    "index",
    "series_TU",
    "w_drazin",
    "w_drazin_from_blocks",
]
