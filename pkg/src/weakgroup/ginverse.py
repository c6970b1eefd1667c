"""Generalized inverses built on the canonical form, and their characterizations.

Notation in names: ``wcoreep`` is the weighted core-EP inverse ``A^{cEP,W}``,
``wdrazin`` the W-weighted Drazin inverse ``A^{d,W}`` and ``wwg`` the weighted
weak group inverse ``A^{wg,W} = (A^{cEP,W} W)^2 A``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict

import numpy as np

from .errors import (
    DecompositionFailure,
    EquivalenceViolation,
    GInverseError,
    IndexTooLarge,
    NotConsistent,
    ShapeMismatch,
)
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
    null_basis,
    numerical_rank,
    oblique_projector,
    orthogonal_projector,
    residual,
    zero_residual,
)
from .spectral import CanonicalPair, canonical_pair, check_pair, drazin, index, w_drazin


def _square(A, name="A"):
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ShapeMismatch(f"{name} must be square, got {A.shape[0]}x{A.shape[1]}")
    return A


def _outside(P: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Component of the columns of ``X`` outside ``R(P)`` for an orthogonal projector ``P``."""
    return X - P @ X


# -- unweighted inverses ---------------------------------------------------

def _core_outer(A, U: np.ndarray, ctx: NumericContext) -> np.ndarray:
    # outer inverse with range R(U) and null space R(U)^perp
    return U @ invert(ctranspose(U) @ A @ U, ctx) @ ctranspose(U)


def core_ep(A, ctx: NumericContext = DEFAULT_CONTEXT, verify: bool = True) -> np.ndarray:
    """Core-EP inverse, equal to ``A^d P_{R(A^k)}``.

    Evaluated as the outer inverse ``U (U^* A U)^(-1) U^*`` with ``U``
    spanning ``R(A^k)``; going through ``A^d`` would multiply by the oblique
    projector ``A A^d``, whose norm grows with the coupling to the nilpotent
    part.
    """
    A = _square(A)
    ind = index(A, ctx)
    P = orthogonal_projector(ind.range)
    if ind.stable_rank == 0:
        return np.zeros_like(A)
    try:
        X = _core_outer(A, ind.range.frame, ctx)
    except GInverseError as exc:
        raise DecompositionFailure(f"compression of A to R(A^k) is singular: {exc}") from exc
    if verify:
        if not ctx.close(A @ X, P):
            raise DecompositionFailure("A A^cEP is not the projector onto R(A^k)")
        if not ctx.negligible(_outside(P, X), fro(X)):
            raise DecompositionFailure("core-EP inverse leaves R(A^k)")
    return X


def weak_group(A, ctx: NumericContext = DEFAULT_CONTEXT, verify: bool = True) -> np.ndarray:
    """Weak group inverse ``(A^cEP)^2 A``, computed without the weighted machinery.

    With ``A^cEP = U Z^(-1) U^*`` and ``Z = U^* A U`` this is
    ``U Z^(-2) U^* A``, evaluated by two solves.
    """
    A = _square(A)
    ind = index(A, ctx)
    if ind.stable_rank == 0:
        return np.zeros_like(A)
    U = ind.range.frame
    Z = ctranspose(U) @ A @ U
    invert(Z, ctx)  # raises Singular on a degenerate compression
    X = U @ np.linalg.solve(Z, np.linalg.solve(Z, ctranspose(U) @ A))
    if verify:
        C = _core_outer(A, U, ctx)
        if not (ctx.close(A @ X @ X, X) and ctx.close(A @ X, C @ A)):
            raise DecompositionFailure("weak group inverse fails A X^2 = X, A X = A^cEP A")
    return X


def group_inverse(A, ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    A = _square(A)
    k = index(A, ctx).index
    if k > 1:
        raise IndexTooLarge(f"group inverse needs index <= 1, matrix has index {k}")
    return drazin(A, ctx)


def core_inverse(A, ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    """Core inverse ``A^# A A^+`` of an index-one matrix.

    Computed as the outer inverse with range ``R(A)`` and null space
    ``N(A^*)``, which avoids forming the possibly large projector ``A^# A``.
    """
    A = _square(A)
    ind = index(A, ctx)
    if ind.index > 1:
        raise IndexTooLarge(f"core inverse needs index <= 1, matrix has index {ind.index}")
    if ind.stable_rank == 0:
        return np.zeros_like(A)
    try:
        return _core_outer(A, ind.range.frame, ctx)
    except GInverseError as exc:
        raise DecompositionFailure(f"compression of A to R(A) is singular: {exc}") from exc


def outer_inverse_prescribed(M, T: SubspaceBasis, S: SubspaceBasis,
                             ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    """Outer inverse ``B`` of ``M`` with ``R(B) = T`` and ``N(B) = S``.

    ``B = C (D M C)^(-1) D`` where the columns of ``C`` span ``T`` and the
    rows of ``D`` span the orthogonal complement of ``S``.
    """
    M = as_matrix(M, "M")
    p, q = M.shape
    if T.ambient_dim != q or S.ambient_dim != p:
        raise ShapeMismatch(
            f"range must live in C^{q} and null space in C^{p} for a {p}x{q} matrix")
    C = T.frame
    D = ctranspose(complement_basis(S, ctx).frame)
    if D.shape[0] != C.shape[1]:
        raise NotConsistent(
            f"dim T = {C.shape[1]} but codim S = {D.shape[0]}; no such outer inverse")
    core = D @ M @ C
    if numerical_rank(core, ctx) < core.shape[0]:
        raise NotConsistent("D M C is singular; no outer inverse with this range and null space")
    return C @ invert(core, ctx) @ D


# -- weighted inverses -----------------------------------------------------

def wcoreep_from_pair(cp: CanonicalPair, ctx: NumericContext = DEFAULT_CONTEXT) -> np.ndarray:
    return cp.to_y_x(invert(cp.W1 @ cp.A1 @ cp.W1, ctx))


def weighted_core_ep(A, W, ctx: NumericContext = DEFAULT_CONTEXT, verify: bool = True,
                     cp: CanonicalPair = None) -> np.ndarray:
    """Weighted core-EP inverse, assembled as ``q1 (W1 A1 W1)^(-1) p1^*``."""
    A, W = check_pair(A, W, ctx)
    if cp is None:
        cp = canonical_pair(A, W, ctx)
    X = wcoreep_from_pair(cp, ctx)
    if verify:
        # R((WA)^d) = R(W A^{d,W}) and R(A^{d,W}) = R((AW)^d)
        if not ctx.close(W @ A @ W @ X, orthogonal_projector(cp.p1)):
            raise DecompositionFailure("W A W A^{cEP,W} is not the projector onto R((WA)^d)")
        if not ctx.negligible(_outside(orthogonal_projector(cp.q1), X), fro(X)):
            raise DecompositionFailure("weighted core-EP inverse leaves R(A^{d,W})")
    return X


def weighted_weak_group(A, W, ctx: NumericContext = DEFAULT_CONTEXT,
                        verify: bool = True) -> np.ndarray:
    """Weighted weak group inverse ``(A^{cEP,W} W)^2 A``."""
    A, W = check_pair(A, W, ctx)
    C = weighted_core_ep(A, W, ctx, verify)
    CW = C @ W
    X = CW @ CW @ A
    if verify:
        AW = A @ W
        if not (ctx.close(AW @ X @ W @ X, X) and ctx.close(AW @ X, CW @ A)):
            raise DecompositionFailure("weighted weak group inverse fails its defining system")
    return X


# -- representations ---------------------------------------------------------

@dataclass(frozen=True)
class RouteTable:
    entries: Dict[str, np.ndarray]
    reference: np.ndarray
    max_pairwise_residual: float

    @classmethod
    def from_entries(cls, entries: Dict[str, np.ndarray], reference_key: str = "DEF"):
        shapes = {v.shape for v in entries.values()}
        if len(shapes) != 1:
            raise DecompositionFailure(f"routes produced different shapes: {sorted(shapes)}")
        worst = 0.0
        for a, b in itertools.combinations(entries.values(), 2):
            worst = max(worst, residual(a, b))
        return cls(dict(entries), entries[reference_key], worst)

    def residuals_to_reference(self) -> Dict[str, float]:
        return {k: residual(v, self.reference) for k, v in self.entries.items()}


def _run_routes(routes: Dict[str, Callable[[], np.ndarray]]) -> Dict[str, np.ndarray]:
    out = {}
    for name, route in routes.items():
        try:
            out[name] = route()
        except GInverseError as exc:
            raise type(exc)(f"route {name}: {exc}") from exc
    return out


@dataclass
class WeightedParts:
    """Quantities shared by the representation routes and the theorem checks."""

    A: np.ndarray
    W: np.ndarray
    ctx: NumericContext
    cp: CanonicalPair
    wcoreep: np.ndarray
    wdrazin: np.ndarray
    wwg: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def compute(cls, A, W, ctx: NumericContext = DEFAULT_CONTEXT, verify: bool = False):
        A, W = check_pair(A, W, ctx)
        cp = canonical_pair(A, W, ctx)
        C = weighted_core_ep(A, W, ctx, verify=verify, cp=cp)
        D = w_drazin(A, W, ctx, check=False)
        CW = C @ W
        return cls(A, W, ctx, cp, C, D, CW @ CW @ A)

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def AW(self):
        return self._memo("AW", lambda: self.A @ self.W)

    @property
    def WA(self):
        return self._memo("WA", lambda: self.W @ self.A)

    def range_wdrazin(self) -> SubspaceBasis:
        # R(A^{d,W}) = R((AW)^d), whose frame the index search already produced
        return self.cp.q1

    def oblique(self) -> np.ndarray:
        """``P_{R(W A^{d,W}), N(A^{cEP,W} W A)}``.

        ``A^{cEP,W}`` is injective on ``L = R(W A^{d,W})`` and vanishes on its
        orthogonal complement, so ``N(A^{cEP,W} W A) = N(L^* W A)``; the
        right-hand form does not inherit the conditioning of ``W1 A1 W1``.
        """
        def build():
            ctx = self.ctx
            L = self.cp.p1  # R(W A^{d,W}) = R((WA)^d)
            M = null_basis(ctranspose(L.frame) @ self.WA, ctx, rtol=ctx.index_rtol)
            return oblique_projector(L, M, ctx)
        return self._memo("oblique", build)

    def WP_dagger(self) -> np.ndarray:
        """``(W P_{R((AW)^d)})^+``."""
        def build():
            P = orthogonal_projector(index(self.AW, self.ctx).range)
            return moore_penrose(self.W @ P, self.ctx, rtol=self.ctx.index_rtol)
        return self._memo("WPdag", build)

    def AW_drazin(self):
        return self._memo("AWd", lambda: drazin(self.AW, self.ctx))

    def wg_AW(self):
        return self._memo("wgAW", lambda: weak_group(self.AW, self.ctx, verify=False))

    def wg_WA(self):
        return self._memo("wgWA", lambda: weak_group(self.WA, self.ctx, verify=False))


ROUTES = ("DEF", "GEOM", "REP_I", "REP_II", "REP_III", "REP_IV", "REP_V", "REP_VI",
          "REP_VII", "PRODUCT", "TRANSFER")


def _geometric_solution(parts: WeightedParts) -> np.ndarray:
    # B = C Z with R(C) = R(A^{d,W}) and W A W C Z = P_{R(WA^{d,W}), N(A^{cEP,W} WA)}
    ctx = parts.ctx
    C = parts.range_wdrazin().frame
    WAWC = parts.WA @ parts.W @ C
    return C @ moore_penrose(WAWC, ctx, rtol=ctx.index_rtol) @ parts.oblique()


def _core_inverse_route(M, ctx):
    try:
        return core_inverse(M, ctx)
    except IndexTooLarge as exc:
        raise DecompositionFailure(f"(AW)^3 (AW)^d is not group invertible: {exc}") from exc


def wwg_representations(A, W, ctx: NumericContext = DEFAULT_CONTEXT,
                        parts: WeightedParts = None) -> RouteTable:
    """Weighted weak group inverse by eleven independent formulas."""
    if parts is None:
        parts = WeightedParts.compute(A, W, ctx)
    A, W, C, D = parts.A, parts.W, parts.wcoreep, parts.wdrazin
    AW, WA = parts.AW, parts.WA

    def rep_vii():
        AWd = parts.AW_drazin()
        return _core_inverse_route(AW @ AW @ AW @ AWd, ctx) @ AW @ C @ WA

    def transfer():
        G = parts.wg_WA()
        return A @ G @ G

    routes = {
        "DEF": lambda: (C @ W) @ (C @ W) @ A,
        "GEOM": lambda: _geometric_solution(parts),
        "REP_I": lambda: C @ parts.oblique(),
        "REP_II": lambda: D @ parts.oblique(),
        "REP_III": lambda: parts.WP_dagger() @ group_inverse(WA @ core_ep(WA, ctx) @ WA, ctx),
        "REP_IV": lambda: core_ep(AW @ AW, ctx) @ AW @ C @ WA,
        "REP_V": lambda: parts.AW_drazin() @ parts.AW_drazin() @ parts.WP_dagger() @ WA,
        "REP_VI": lambda: parts.WP_dagger() @ core_ep(WA @ WA, ctx) @ WA,
        "REP_VII": rep_vii,
        "PRODUCT": lambda: parts.wg_AW() @ A @ parts.wg_WA(),
        "TRANSFER": transfer,
    }
    return RouteTable.from_entries(_run_routes(routes))


def wg_representations(A, ctx: NumericContext = DEFAULT_CONTEXT) -> RouteTable:
    """Weak group inverse of a square matrix by the unweighted formulas."""
    A = _square(A)
    C = core_ep(A, ctx, verify=False)
    Ad = drazin(A, ctx)
    P_range = orthogonal_projector(index(A, ctx).range)

    def oblique():
        # N(A^cEP A) = N(L^* A) as in WeightedParts.oblique
        L = index(A, ctx).range  # R(A^d) = R(A^k)
        M = null_basis(ctranspose(L.frame) @ A, ctx, rtol=ctx.index_rtol)
        return oblique_projector(L, M, ctx)

    routes = {
        "DEF": lambda: C @ C @ A,
        "REP_I": lambda: C @ oblique(),
        "REP_II": lambda: Ad @ oblique(),
        "REP_III": lambda: group_inverse(A @ C @ A, ctx),
        "REP_III_PROJ": lambda: group_inverse(P_range @ A, ctx),
        "REP_IV": lambda: core_ep(A @ A, ctx) @ A @ C @ A,
        "REP_V": lambda: Ad @ Ad @ P_range @ A,
        "REP_VI": lambda: core_ep(A @ A, ctx) @ A,
        "REP_VII": lambda: _core_inverse_route(A @ A @ A @ Ad, ctx) @ A,
    }
    return RouteTable.from_entries(_run_routes(routes))


# -- characterizations -------------------------------------------------------

class Variant(str, enum.Enum):
    SYSTEM = "SYSTEM"
    GEOMETRIC = "GEOMETRIC"
    CHAR_II = "CHAR_II"
    CHAR_III = "CHAR_III"
    CHAR_IV = "CHAR_IV"


@dataclass(frozen=True)
class CheckResult:
    """A set of conditions, each with its relative residual and verdict."""

    holds: bool
    residuals: Dict[str, float]
    verdicts: Dict[str, bool]

    def __bool__(self):
        return self.holds


class _Conditions:
    def __init__(self, ctx: NumericContext):
        self.ctx = ctx
        self.residuals: Dict[str, float] = {}
        self.verdicts: Dict[str, bool] = {}

    def equal(self, label, L, R):
        self.residuals[label] = residual(L, R)
        self.verdicts[label] = self.ctx.close(L, R)

    def zero(self, label, V, scale):
        self.residuals[label] = zero_residual(V, scale)
        self.verdicts[label] = self.ctx.negligible(V, scale)

    def result(self) -> CheckResult:
        return CheckResult(all(self.verdicts.values()), self.residuals, self.verdicts)


def characterization_check(A, W, B, ctx: NumericContext = DEFAULT_CONTEXT,
                           variant: Variant = Variant.SYSTEM,
                           char_iv_power_form: bool = False,
                           parts: WeightedParts = None) -> CheckResult:
    """Does ``B`` satisfy the chosen condition set characterizing ``A^{wg,W}``?

    ``char_iv_power_form`` replaces the last CHAR_IV equation by
    ``B W (AW)^(k+1) = (AW)^k`` with ``k = ind(AW)``.
    """
    variant = Variant(variant)
    if parts is None:
        parts = WeightedParts.compute(A, W, ctx)
    B = as_matrix(B, "B")
    if B.shape != parts.A.shape:
        raise ShapeMismatch(f"B must have the shape of A {parts.A.shape}, got {B.shape}")
    A, W, C, D = parts.A, parts.W, parts.wcoreep, parts.wdrazin
    AW, WA = parts.AW, parts.WA
    cond = _Conditions(ctx)
    if variant is Variant.SYSTEM:
        cond.equal("AWBWB=B", AW @ B @ W @ B, B)
        cond.equal("AWB=CWA", AW @ B, C @ WA)
    elif variant is Variant.GEOMETRIC:
        cond.equal("WAWB=P", WA @ W @ B, parts.oblique())
        P = orthogonal_projector(parts.range_wdrazin())
        cond.zero("R(B)<=R(Ad)", _outside(P, B), fro(B))
    elif variant is Variant.CHAR_II:
        cond.equal("CWAWB=B", C @ WA @ W @ B, B)
        cond.equal("AWB=CWA", AW @ B, C @ WA)
    elif variant is Variant.CHAR_III:
        cond.equal("BWAWB=B", B @ WA @ W @ B, B)
        cond.equal("AWB=CWA", AW @ B, C @ WA)
        cond.equal("BWC=CWC", B @ W @ C, C @ W @ C)
    else:
        cond.equal("BWAWB=B", B @ WA @ W @ B, B)
        cond.equal("AWB=CWA", AW @ B, C @ WA)
        if char_iv_power_form:
            k = index(AW, ctx).index
            AWk = np.linalg.matrix_power(AW, k)
            cond.equal("BW(AW)^(k+1)=(AW)^k", B @ W @ AWk @ AW, AWk)
        else:
            cond.equal("BWAd=AdWAd", B @ W @ D, D @ W @ D)
    return cond.result()


# -- commutation -------------------------------------------------------------

@dataclass(frozen=True)
class CommutationReport:
    commutes: bool
    block_condition: bool
    square_identity: bool
    aw_square_identity: bool
    aw_block_condition: bool
    equals_wdrazin: bool
    residuals: Dict[str, float]

    @property
    def consistent(self) -> bool:
        return (self.commutes == self.block_condition == self.square_identity
                and self.aw_square_identity == self.aw_block_condition
                and (self.equals_wdrazin or not self.commutes))


def commutation_analysis(A, W, ctx: NumericContext = DEFAULT_CONTEXT, strict: bool = True,
                         parts: WeightedParts = None) -> CommutationReport:
    """Evaluate the commutation property and its equivalent block and square forms.

    With ``strict`` an inconsistent report (conditions that must agree but
    do not) raises :class:`EquivalenceViolation`.
    """
    if parts is None:
        parts = WeightedParts.compute(A, W, ctx)
    A, W, X = parts.A, parts.W, parts.wwg
    AW, WA = parts.AW, parts.WA
    cp = parts.cp
    A1, A2, A3, W1, W2, W3 = cp.A1, cp.A2, cp.A3, cp.W1, cp.W2, cp.W3
    cond = _Conditions(ctx)
    cond.equal("commutes", AW @ X, X @ WA)
    cond.zero("block_condition", (W1 @ A2 + W2 @ A3) @ W3 @ A3,
              (fro(W1) * fro(A2) + fro(W2) * fro(A3)) * fro(W3) * fro(A3))
    g = parts.wg_WA()
    cond.equal("square_identity", g @ g, weak_group(WA @ WA, ctx, verify=False))
    h = parts.wg_AW()
    cond.equal("aw_square_identity", h @ h, weak_group(AW @ AW, ctx, verify=False))
    cond.zero("aw_block_condition", (A1 @ W2 + A2 @ W3) @ A3 @ W3,
              (fro(A1) * fro(W2) + fro(A2) * fro(W3)) * fro(A3) * fro(W3))
    cond.equal("equals_wdrazin", X, parts.wdrazin)
    v = cond.verdicts
    report = CommutationReport(v["commutes"], v["block_condition"], v["square_identity"],
                               v["aw_square_identity"], v["aw_block_condition"],
                               v["equals_wdrazin"], cond.residuals)
    if strict and not report.consistent:
        raise EquivalenceViolation(f"commutation conditions disagree: {report}")
    return report


__all__ = [
    "CheckResult",
    "CommutationReport",
    "ROUTES",
    "RouteTable",
    "Variant",
    "WeightedParts",
    "characterization_check",
    "commutation_analysis",
    "core_ep",
    "core_inverse",
    "group_inverse",
    "outer_inverse_prescribed",
    "weak_group",
    "weighted_core_ep",
    "weighted_weak_group",
    "wg_representations",
    "wwg_representations",
]
