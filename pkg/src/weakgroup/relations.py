"""The weak group relation, its weighted one-sided versions, and block tests.

``A <= B`` under the weak group relation means ``A A^wg = B A^wg`` and
``A^wg A = A^wg B``.  The weighted relations compare ``AW`` with ``BW``
(right) or ``WA`` with ``WB`` (left).

Every equation is tested as a difference ``L - R`` against the magnitude of
the factors that produced it, so a verdict does not depend on how large
``A^wg`` happens to be.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import EquivalenceViolation, ShapeMismatch
from .ginverse import _square, core_ep, weak_group, weighted_weak_group
from .numeric import (
    DEFAULT_CONTEXT,
    NumericContext,
    as_matrix,
    fro,
    invert,
    zero_residual,
)
from .spectral import canonical_pair, check_pair, drazin


class Method(str, enum.Enum):
    DIRECT = "DIRECT"
    BLOCK = "BLOCK"


class Side(str, enum.Enum):
    RIGHT = "RIGHT"
    LEFT = "LEFT"
    BOTH = "BOTH"


@dataclass(frozen=True)
class RelationVerdict:
    holds: bool
    left_residual: float
    right_residual: float
    method: Method

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"holds": self.holds, "left_residual": self.left_residual,
                "right_residual": self.right_residual, "method": self.method.value}


class _Zeros:
    """Accumulates zero tests; the residual of a group is its worst member."""

    def __init__(self, ctx: NumericContext):
        self.ctx = ctx
        self.ok = True
        self.worst = 0.0

    def add(self, V, scale):
        self.ok = self.ok and self.ctx.negligible(V, scale)
        self.worst = max(self.worst, zero_residual(V, scale))
        return self


def _same_size(A, B):
    if A.shape != B.shape:
        raise ShapeMismatch(f"A is {A.shape[0]}x{A.shape[1]} but B is {B.shape[0]}x{B.shape[1]}")


def _direct(A, B, X, ctx) -> Tuple[_Zeros, _Zeros]:
    nA, nB, nX = fro(A), fro(B), fro(X)
    first = _Zeros(ctx).add(A @ X - B @ X, (nA + nB) * nX)
    second = _Zeros(ctx).add(X @ A - X @ B, (nA + nB) * nX)
    return first, second


def _verdict(first: _Zeros, second: _Zeros, method: Method) -> RelationVerdict:
    return RelationVerdict(first.ok and second.ok, first.worst, second.worst, method)


def wg_below(A, B, ctx: NumericContext = DEFAULT_CONTEXT,
             method: Method = Method.DIRECT) -> RelationVerdict:
    """Is ``A`` below ``B`` under the weak group relation?"""
    A = _square(A)
    B = as_matrix(B, "B")
    _same_size(A, B)
    if Method(method) is Method.BLOCK:
        return _block_verdict(A, np.eye(A.shape[0], dtype=complex), B, Side.RIGHT, ctx)
    X = weak_group(A, ctx, verify=False)
    return _verdict(*_direct(A, B, X, ctx), Method.DIRECT)


def _check_triple(A, W, B, ctx):
    A, W = check_pair(A, W, ctx)
    B = as_matrix(B, "B")
    _same_size(A, B)
    return A, W, B


def _combine(a: RelationVerdict, b: RelationVerdict) -> RelationVerdict:
    return RelationVerdict(a.holds and b.holds, max(a.left_residual, b.left_residual),
                           max(a.right_residual, b.right_residual), a.method)


def _direct_left(A, W, B, ctx) -> RelationVerdict:
    WA, WB = W @ A, W @ B
    verdict = wg_below(WA, WB, ctx)
    # equivalent form through the weighted weak group inverse
    X = weighted_weak_group(A, W, ctx, verify=False)
    WX = W @ X
    nWA, nWB, nWX = fro(WA), fro(WB), fro(WX)
    alt_first = _Zeros(ctx).add(WA @ WX - WB @ WX, (nWA + nWB) * nWX)
    alt_second = _Zeros(ctx).add(WX @ WA - WX @ WB, nWX * (nWA + nWB))
    alt = alt_first.ok and alt_second.ok
    if alt != verdict.holds:
        raise EquivalenceViolation(
            "left relation disagrees with its form through A^{wg,W}: "
            f"direct residuals ({verdict.left_residual:.3e}, {verdict.right_residual:.3e}), "
            f"weighted residuals ({alt_first.worst:.3e}, {alt_second.worst:.3e})")
    return verdict


def wwg_below(A, W, B, ctx: NumericContext = DEFAULT_CONTEXT, side: Side = Side.BOTH,
              method: Method = Method.DIRECT) -> RelationVerdict:
    """Weighted weak group relations.

    ``RIGHT`` tests ``AW <= BW``, ``LEFT`` tests ``WA <= WB`` and ``BOTH``
    requires the two.  The left test is cross-checked against the equivalent
    pair of equations ``WAW X = WBW X`` and ``WX WA = WX WB`` with
    ``X = A^{wg,W}``; a disagreement raises :class:`EquivalenceViolation`.
    """
    side, method = Side(side), Method(method)
    A, W, B = _check_triple(A, W, B, ctx)
    if method is Method.BLOCK:
        return _block_verdict(A, W, B, side, ctx)
    if side is Side.RIGHT:
        return wg_below(A @ W, B @ W, ctx)
    if side is Side.LEFT:
        return _direct_left(A, W, B, ctx)
    return _combine(wg_below(A @ W, B @ W, ctx), _direct_left(A, W, B, ctx))


# -- block characterizations -------------------------------------------------

def _block_conditions(cp, B, ctx) -> Dict[str, Tuple[_Zeros, _Zeros]]:
    """Block conditions for both sides, split by the equation they encode.

    With ``D = B - A`` in the canonical bases, ``H = (A1 W1)^-1``,
    ``L = A1 W2 + A2 W3``, ``G = (W1 A1)^-1`` and ``K = W1 A2 + W2 A3``:

    right, first equation:  ``D1 = 0``, ``D4 = 0``
    right, second equation: ``D1 W1 + H L D4 W1 = 0``,
                            ``D1 W2 + D2 W3 + H L (D4 W2 + D3 W3) = 0``
    left, first equation:   ``W1 D1 + W2 D4 = 0``, ``W3 D4 = 0``
    left, second equation:  ``W1 D1 + W2 D4 + G K W3 D4 = 0``,
                            ``W1 D2 + W2 D3 + G K W3 D3 = 0``

    Taken together the right conditions are ``B1 = A1``, ``B4 = 0`` and
    ``(A2 - B2) W3 + (A1 W1)^-1 (A1 W2 + A2 W3)(A3 - B3) W3 = 0``; the left
    ones are ``W3 B4 = 0``, ``B1 = A1 - W1^-1 W2 B4`` and the formula for
    ``B2`` in terms of ``A3 - B3``.
    """
    B1, B2, B4, B3 = cp.blocks_y_x(B)
    A1, A2, A3, W1, W2, W3 = cp.A1, cp.A2, cp.A3, cp.W1, cp.W2, cp.W3
    D1, D2, D3, D4 = B1 - A1, B2 - A2, B3 - A3, B4
    n = {k: fro(v) for k, v in dict(A1=A1, A2=A2, A3=A3, W1=W1, W2=W2, W3=W3,
                                     B1=B1, B2=B2, B3=B3, B4=B4).items()}
    # a difference D_i is judged against the blocks it came from
    nD1, nD2, nD3, nD4 = n["A1"] + n["B1"], n["A2"] + n["B2"], n["A3"] + n["B3"], n["B4"]
    H = invert(A1 @ W1, ctx)
    G = invert(W1 @ A1, ctx)
    L = A1 @ W2 + A2 @ W3
    K = W1 @ A2 + W2 @ A3
    HL, GK = H @ L, G @ K
    nHL, nGK = fro(HL), fro(GK)

    right_first = _Zeros(ctx).add(D1, nD1).add(D4, nD4)
    right_second = (_Zeros(ctx)
                    .add(D1 @ W1 + HL @ D4 @ W1, (nD1 + nHL * nD4) * n["W1"])
                    .add(D1 @ W2 + D2 @ W3 + HL @ (D4 @ W2 + D3 @ W3),
                         nD1 * n["W2"] + nD2 * n["W3"]
                         + nHL * (nD4 * n["W2"] + nD3 * n["W3"])))
    left_first = (_Zeros(ctx)
                  .add(W1 @ D1 + W2 @ D4, n["W1"] * nD1 + n["W2"] * nD4)
                  .add(W3 @ D4, n["W3"] * nD4))
    left_second = (_Zeros(ctx)
                   .add(W1 @ D1 + W2 @ D4 + GK @ W3 @ D4,
                        n["W1"] * nD1 + (n["W2"] + nGK * n["W3"]) * nD4)
                   .add(W1 @ D2 + W2 @ D3 + GK @ W3 @ D3,
                        n["W1"] * nD2 + (n["W2"] + nGK * n["W3"]) * nD3))
    return {Side.RIGHT: (right_first, right_second), Side.LEFT: (left_first, left_second)}


def _block_verdict(A, W, B, side: Side, ctx) -> RelationVerdict:
    cp = canonical_pair(A, W, ctx)
    conds = _block_conditions(cp, B, ctx)
    if side is Side.BOTH:
        return _combine(_verdict(*conds[Side.RIGHT], Method.BLOCK),
                        _verdict(*conds[Side.LEFT], Method.BLOCK))
    return _verdict(*conds[side], Method.BLOCK)


@dataclass(frozen=True)
class RelationBlockAnalysis:
    direct_right: bool
    block_right: bool
    direct_left: bool
    block_left: bool
    residuals: Dict[str, float]

    @property
    def consistent(self) -> bool:
        return self.direct_right == self.block_right and self.direct_left == self.block_left

    def to_dict(self) -> dict:
        return {"direct_right": self.direct_right, "block_right": self.block_right,
                "direct_left": self.direct_left, "block_left": self.block_left,
                "consistent": self.consistent, "residuals": dict(self.residuals)}


def relation_block_analysis(A, W, B, ctx: NumericContext = DEFAULT_CONTEXT
                            ) -> RelationBlockAnalysis:
    """Evaluate both one-sided relations directly and through ``B``'s blocks."""
    A, W, B = _check_triple(A, W, B, ctx)
    verdicts = {
        "direct_right": wwg_below(A, W, B, ctx, Side.RIGHT),
        "block_right": wwg_below(A, W, B, ctx, Side.RIGHT, Method.BLOCK),
        "direct_left": wwg_below(A, W, B, ctx, Side.LEFT),
        "block_left": wwg_below(A, W, B, ctx, Side.LEFT, Method.BLOCK),
    }
    residuals = {}
    for name, v in verdicts.items():
        residuals[f"{name}.left"] = v.left_residual
        residuals[f"{name}.right"] = v.right_residual
    return RelationBlockAnalysis(*(v.holds for v in verdicts.values()), residuals)


# -- lemma and pre-order probes ----------------------------------------------

@dataclass(frozen=True)
class LemmaReport:
    part_i: Dict[str, bool]
    part_ii: Dict[str, bool]
    residuals: Dict[str, float]

    @property
    def consistent(self) -> bool:
        return len(set(self.part_i.values())) == 1 and len(set(self.part_ii.values())) == 1

    def to_dict(self) -> dict:
        return {"part_i": dict(self.part_i), "part_ii": dict(self.part_ii),
                "consistent": self.consistent, "residuals": dict(self.residuals)}


def _product(*factors):
    out = factors[0]
    for f in factors[1:]:
        out = out @ f
    return out, float(np.prod([fro(f) for f in factors]))


def lemma_equiv_suite(A, B, ctx: NumericContext = DEFAULT_CONTEXT) -> LemmaReport:
    """The five equivalent forms of ``A A^wg = B A^wg`` and the two of ``A^wg A = A^wg B``."""
    A = _square(A)
    B = as_matrix(B, "B")
    _same_size(A, B)
    C = core_ep(A, ctx, verify=False)
    Ad = drazin(A, ctx)
    X = C @ C @ A
    equations = {
        "i.AX=BX": ((A, X), (B, X)),
        "i.CA=BCCA": ((C, A), (B, C, C, A)),
        "i.C=BCC": ((C,), (B, C, C)),
        "i.Ad=BCAd": ((Ad,), (B, C, Ad)),
        "i.AAd=BAd": ((A, Ad), (B, Ad)),
        "ii.XA=XB": ((X, A), (X, B)),
        "ii.CAA=CAB": ((C, A, A), (C, A, B)),
    }
    verdicts, residuals = {}, {}
    for label, (lhs, rhs) in equations.items():
        L, sL = _product(*lhs)
        R, sR = _product(*rhs)
        verdicts[label] = ctx.negligible(L - R, sL + sR)
        residuals[label] = zero_residual(L - R, sL + sR)
    part_i = {k[2:]: v for k, v in verdicts.items() if k.startswith("i.")}
    part_ii = {k[3:]: v for k, v in verdicts.items() if k.startswith("ii.")}
    return LemmaReport(part_i, part_ii, residuals)


@dataclass(frozen=True)
class TripleProbe:
    a_below_b: bool
    b_below_c: bool
    a_below_c: bool

    @property
    def transitivity_violation(self) -> bool:
        return self.a_below_b and self.b_below_c and not self.a_below_c


@dataclass(frozen=True)
class PairProbe:
    a_below_b: bool
    b_below_a: bool
    distinct: bool

    @property
    def antisymmetry_violation(self) -> bool:
        return self.a_below_b and self.b_below_a and self.distinct


@dataclass(frozen=True)
class PreorderReport:
    triples: List[TripleProbe]
    pairs: List[PairProbe]

    @property
    def transitivity_violations(self) -> List[int]:
        return [i for i, t in enumerate(self.triples) if t.transitivity_violation]

    @property
    def antisymmetry_violations(self) -> List[int]:
        return [i for i, p in enumerate(self.pairs) if p.antisymmetry_violation]

    def to_dict(self) -> dict:
        return {
            "triples": [{"a_below_b": t.a_below_b, "b_below_c": t.b_below_c,
                         "a_below_c": t.a_below_c,
                         "transitivity_violation": t.transitivity_violation}
                        for t in self.triples],
            "pairs": [{"a_below_b": p.a_below_b, "b_below_a": p.b_below_a,
                       "distinct": p.distinct,
                       "antisymmetry_violation": p.antisymmetry_violation}
                      for p in self.pairs],
        }


def preorder_probe(triples: Sequence[Tuple[np.ndarray, np.ndarray, np.ndarray]],
                   ctx: NumericContext = DEFAULT_CONTEXT,
                   pairs: Optional[Sequence[Tuple[np.ndarray, np.ndarray]]] = None
                   ) -> PreorderReport:
    """Look for failures of transitivity (on triples) and antisymmetry (on pairs).

    When ``pairs`` is omitted, each triple's ``(A, B)`` is probed for
    antisymmetry as well.
    """
    tri = []
    for A, B, C in triples:
        tri.append(TripleProbe(wg_below(A, B, ctx).holds, wg_below(B, C, ctx).holds,
                               wg_below(A, C, ctx).holds))
    if pairs is None:
        pairs = [(A, B) for A, B, _ in triples]
    pr = []
    for A, B in pairs:
        A, B = as_matrix(A, "A"), as_matrix(B, "B")
        _same_size(A, B)
        pr.append(PairProbe(wg_below(A, B, ctx).holds, wg_below(B, A, ctx).holds,
                            not ctx.close(A, B)))
    return PreorderReport(tri, pr)


def nilpotent_pair(n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Two distinct strictly upper triangular matrices, the antisymmetry witnesses."""
    if n < 2:
        raise ShapeMismatch("nilpotent witnesses need n >= 2")
    draw = lambda: np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)), k=1)
    return draw(), draw() + np.triu(np.ones((n, n)), k=1)


EXAMPLE_A = np.array([[1, 1, 1], [0, 0, 1], [0, 0, 0]], dtype=complex)
EXAMPLE_B = np.array([[1, 1, 0], [0, 0, 2], [0, 0, 0]], dtype=complex)
EXAMPLE_C = np.array([[1, 0, 1], [0, 1, 1], [0, 1, 1]], dtype=complex)


__all__ = [
    "EXAMPLE_A",
    "EXAMPLE_B",
    "EXAMPLE_C",
    "LemmaReport",
    "Method",
    "PairProbe",
    "PreorderReport",
    "RelationBlockAnalysis",
    "RelationVerdict",
    "Side",
    "TripleProbe",
    "lemma_equiv_suite",
    "nilpotent_pair",
    "preorder_probe",
    "relation_block_analysis",
    "wg_below",
    "wwg_below",
]
