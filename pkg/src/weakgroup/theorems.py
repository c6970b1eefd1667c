"""Registry of checkable statements, keyed by stable identifiers.

Each check evaluates one statement about the weighted weak group inverse on
concrete matrices and returns a :class:`TheoremCheck` carrying every
residual behind its verdict.  The conformance suite and the ``verify``
command share these functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .errors import InputError
from .ginverse import (
    Variant,
    WeightedParts,
    characterization_check,
    commutation_analysis,
    outer_inverse_prescribed,
    weak_group,
    wg_representations,
    wwg_representations,
)
from .numeric import (
    DEFAULT_CONTEXT,
    NumericContext,
    ctranspose,
    fro,
    null_basis,
    residual,
    zero_residual,
)
from .relations import (
    lemma_equiv_suite,
    preorder_probe,
    relation_block_analysis,
)
from .spectral import drazin


@dataclass(frozen=True)
class TheoremCheck:
    theorem_id: str
    holds: bool
    residuals: Dict[str, float]
    verdicts: Dict[str, bool]
    details: Dict[str, object] = field(default_factory=dict)

    def __bool__(self):
        return self.holds

    def to_dict(self) -> dict:
        return {"theorem": self.theorem_id, "holds": self.holds,
                "residuals": dict(self.residuals), "verdicts": dict(self.verdicts),
                "details": dict(self.details)}


class _Log:
    def __init__(self, ctx: NumericContext):
        self.ctx = ctx
        self.residuals: Dict[str, float] = {}
        self.verdicts: Dict[str, bool] = {}
        self.details: Dict[str, object] = {}

    def equal(self, label, L, R):
        self.residuals[label] = residual(L, R)
        self.verdicts[label] = self.ctx.close(L, R)
        return self.verdicts[label]

    def zero(self, label, V, scale):
        self.residuals[label] = zero_residual(V, scale)
        self.verdicts[label] = self.ctx.negligible(V, scale)
        return self.verdicts[label]

    def flag(self, label, value: bool, res: float = 0.0):
        self.residuals[label] = float(res)
        self.verdicts[label] = bool(value)
        return value

    def merge(self, prefix, check):
        for k, v in check.residuals.items():
            self.residuals[f"{prefix}.{k}"] = v
        for k, v in check.verdicts.items():
            self.verdicts[f"{prefix}.{k}"] = v

    def done(self, theorem_id, holds=None) -> TheoremCheck:
        if holds is None:
            holds = all(self.verdicts.values())
        return TheoremCheck(theorem_id, bool(holds), self.residuals, self.verdicts, self.details)


@dataclass
class Inputs:
    """Matrices a statement is evaluated on; ``parts`` is filled lazily."""

    A: np.ndarray
    W: Optional[np.ndarray] = None
    B: Optional[np.ndarray] = None
    C: Optional[np.ndarray] = None
    ctx: NumericContext = DEFAULT_CONTEXT
    _parts: Optional[WeightedParts] = None

    @property
    def parts(self) -> WeightedParts:
        if self._parts is None:
            if self.W is None:
                raise InputError("this statement needs a weight W")
            self._parts = WeightedParts.compute(self.A, self.W, self.ctx)
        return self._parts

    def need(self, *names):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise InputError(f"this statement needs {', '.join(missing)}")


def _subject(inp: Inputs):
    """The matrix a characterization is tested on: ``B`` if given, else ``A^{wg,W}``."""
    return inp.parts.wwg if inp.B is None else inp.B


def defining_system(inp: Inputs) -> TheoremCheck:
    r = characterization_check(inp.A, inp.W, _subject(inp), inp.ctx, Variant.SYSTEM,
                               parts=inp.parts)
    return TheoremCheck("thm-defining-system", r.holds, r.residuals, r.verdicts)


def geometric(inp: Inputs) -> TheoremCheck:
    r = characterization_check(inp.A, inp.W, _subject(inp), inp.ctx, Variant.GEOMETRIC,
                               parts=inp.parts)
    return TheoremCheck("thm-geometric", r.holds, r.residuals, r.verdicts)


def characterizations(inp: Inputs) -> TheoremCheck:
    """Every condition set gives the same verdict on the subject matrix."""
    log = _Log(inp.ctx)
    B = _subject(inp)
    outcomes = {}
    for variant in Variant:
        r = characterization_check(inp.A, inp.W, B, inp.ctx, variant, parts=inp.parts)
        log.merge(variant.value, r)
        outcomes[variant.value] = r.holds
    r = characterization_check(inp.A, inp.W, B, inp.ctx, Variant.CHAR_IV,
                               char_iv_power_form=True, parts=inp.parts)
    log.merge("CHAR_IV_POWER", r)
    outcomes["CHAR_IV_POWER"] = r.holds
    log.details["outcomes"] = outcomes
    log.details["is_wwg"] = all(outcomes.values())
    return log.done("thm-characterizations", len(set(outcomes.values())) == 1)


def _lemma_nulls(parts: WeightedParts):
    # A^{cEP,W} = q1 Z p1^* with Z invertible, so N(A^{cEP,W} M) = N(p1^* M)
    p1 = ctranspose(parts.cp.p1.frame)
    W, WA, AW = parts.W, parts.WA, parts.AW
    ctx = parts.ctx
    kernels = {"AWXW": p1 @ WA @ W, "WAWX": p1 @ WA, "XWAW": p1 @ W @ AW @ AW,
               "WXWA": p1 @ WA @ WA}
    return {k: null_basis(M, ctx, rtol=ctx.index_rtol) for k, M in kernels.items()}


def projector_lemma(inp: Inputs) -> TheoremCheck:
    """The four projectors built from ``X = A^{wg,W}`` and the outer inverse law."""
    parts, ctx = inp.parts, inp.ctx
    W, X = parts.W, parts.wwg
    AW, WA = parts.AW, parts.WA
    log = _Log(ctx)
    ranges = {"AWXW": parts.cp.q1, "WAWX": parts.cp.p1, "XWAW": parts.cp.q1,
              "WXWA": parts.cp.p1}
    nulls = _lemma_nulls(parts)
    products = {"AWXW": AW @ X @ W, "WAWX": WA @ W @ X, "XWAW": X @ W @ AW,
                "WXWA": W @ X @ WA}
    for name, P in products.items():
        log.equal(f"{name}.idempotent", P @ P, P)
        R = ranges[name].frame
        log.equal(f"{name}.range", P @ R, R)
        log.zero(f"{name}.null", P @ nulls[name].frame, fro(P))
    WAW = WA @ W
    log.equal("XWAWX=X", X @ WAW @ X, X)
    S = null_basis(ctranspose(parts.cp.p1.frame) @ WA, ctx, rtol=ctx.index_rtol)
    log.equal("outer_inverse", outer_inverse_prescribed(WAW, parts.cp.q1, S, ctx), X)
    return log.done("lem-projectors")


def representations(inp: Inputs) -> TheoremCheck:
    table = wwg_representations(inp.A, inp.W, inp.ctx, inp.parts)
    log = _Log(inp.ctx)
    for k, v in table.residuals_to_reference().items():
        log.flag(f"{k}-DEF", v <= inp.ctx.eq_rtol, v)
    log.flag("max_pairwise", table.max_pairwise_residual <= inp.ctx.eq_rtol,
             table.max_pairwise_residual)
    return log.done("thm-representations")


def transfer(inp: Inputs) -> TheoremCheck:
    parts = inp.parts
    log = _Log(inp.ctx)
    G = parts.wg_WA()
    log.equal("WX=(WA)^wg", parts.W @ parts.wwg, G)
    log.equal("X=A((WA)^wg)^2", parts.wwg, parts.A @ G @ G)
    return log.done("thm-transfer")


def _transfer_conditions(parts: WeightedParts, log: _Log):
    cp = parts.cp
    A2, A3, W2, W3 = cp.A2, cp.A3, cp.W2, cp.W3
    right = log.zero("W2A3W3=0", W2 @ A3 @ W3, fro(W2) * fro(A3) * fro(W3))
    left = log.zero("A2W3A3=0", A2 @ W3 @ A3, fro(A2) * fro(W3) * fro(A3))
    return right, left


def transfer_conditional(inp: Inputs) -> TheoremCheck:
    """``(AW)^wg = X W`` iff ``W2 A3 W3 = 0``; ``X = ((AW)^wg)^2 A`` iff ``A2 W3 A3 = 0``."""
    parts = inp.parts
    log = _Log(inp.ctx)
    H = parts.wg_AW()
    right_id = log.equal("(AW)^wg=XW", H, parts.wwg @ parts.W)
    left_id = log.equal("X=((AW)^wg)^2A", parts.wwg, H @ H @ parts.A)
    right_blk, left_blk = _transfer_conditions(parts, log)
    log.details.update({"right_identity": right_id, "right_block": right_blk,
                        "left_identity": left_id, "left_block": left_blk})
    return log.done("thm-transfer-conditional",
                    right_id == right_blk and left_id == left_blk)


def product(inp: Inputs) -> TheoremCheck:
    parts = inp.parts
    log = _Log(inp.ctx)
    log.equal("X=(AW)^wg A (WA)^wg", parts.wwg, parts.wg_AW() @ parts.A @ parts.wg_WA())
    return log.done("thm-product")


def _commutation(inp: Inputs, theorem_id: str) -> TheoremCheck:
    report = commutation_analysis(inp.A, inp.W, inp.ctx, strict=False, parts=inp.parts)
    log = _Log(inp.ctx)
    names = ("commutes", "block_condition", "square_identity", "equals_wdrazin") \
        if theorem_id == "thm-commutation" else ("aw_square_identity", "aw_block_condition")
    for name in names:
        log.flag(name, getattr(report, name), report.residuals[name])
    if theorem_id == "thm-commutation":
        holds = (report.commutes == report.block_condition == report.square_identity
                 and (report.equals_wdrazin or not report.commutes))
    else:
        holds = report.aw_square_identity == report.aw_block_condition
    return log.done(theorem_id, holds)


def commutation(inp: Inputs) -> TheoremCheck:
    return _commutation(inp, "thm-commutation")


def aw_commutation(inp: Inputs) -> TheoremCheck:
    return _commutation(inp, "thm-aw-commutation")


def canonical(inp: Inputs) -> TheoremCheck:
    """Block form of the pair: reconstruction, nilpotency, and the Drazin blocks."""
    parts, ctx = inp.parts, inp.ctx
    cp = parts.cp
    log = _Log(ctx)
    log.equal("A=Q[A1 A2;0 A3]P*", cp.assemble_A(), parts.A)
    log.equal("W=P[W1 W2;0 W3]Q*", cp.assemble_W(), parts.W)
    for name, M in (("A3W3", cp.A3 @ cp.W3), ("W3A3", cp.W3 @ cp.A3)):
        power = np.linalg.matrix_power(M, M.shape[0]) if M.size else M
        log.zero(f"{name} nilpotent", power, fro(M) ** max(M.shape[0], 1))
    H = np.linalg.inv(cp.A1 @ cp.W1)
    G = np.linalg.inv(cp.W1 @ cp.A1)
    log.equal("(AW)^d blocks", cp.to_y_y(H, cp.T), drazin(parts.AW, ctx))
    log.equal("(WA)^d blocks", cp.to_x_x(G, cp.U), drazin(parts.WA, ctx))
    return log.done("lem-canonical")


def wg_corollary(inp: Inputs) -> TheoremCheck:
    """Unweighted representations, on ``A`` if square, otherwise on ``AW`` and ``WA``."""
    log = _Log(inp.ctx)
    if inp.A.shape[0] == inp.A.shape[1] and inp.W is None:
        subjects = {"A": inp.A}
    else:
        inp.need("W")
        subjects = {"AW": inp.A @ inp.W, "WA": inp.W @ inp.A}
    for name, M in subjects.items():
        table = wg_representations(M, inp.ctx)
        log.flag(f"{name}.max_pairwise", table.max_pairwise_residual <= inp.ctx.eq_rtol,
                 table.max_pairwise_residual)
        log.equal(f"{name}.DEF=weak_group", table.reference,
                  weak_group(M, inp.ctx, verify=False))
    return log.done("cor-wg-representations")


def _relation_block(inp: Inputs, theorem_id: str, side: str) -> TheoremCheck:
    inp.need("W", "B")
    r = relation_block_analysis(inp.A, inp.W, inp.B, inp.ctx)
    log = _Log(inp.ctx)
    key = side.lower()
    for k, v in r.residuals.items():
        if k.split(".")[0].endswith(key):
            log.residuals[k] = v
    direct, block = getattr(r, f"direct_{key}"), getattr(r, f"block_{key}")
    log.verdicts.update({f"direct_{key}": direct, f"block_{key}": block})
    return log.done(theorem_id, direct == block)


def relation_right_block(inp: Inputs) -> TheoremCheck:
    return _relation_block(inp, "rel-right-block", "RIGHT")


def relation_left_block(inp: Inputs) -> TheoremCheck:
    return _relation_block(inp, "rel-left-block", "LEFT")


def relation_lemma(inp: Inputs) -> TheoremCheck:
    inp.need("B")
    r = lemma_equiv_suite(inp.A, inp.B, inp.ctx)
    log = _Log(inp.ctx)
    log.residuals.update(r.residuals)
    log.verdicts.update({f"i.{k}": v for k, v in r.part_i.items()})
    log.verdicts.update({f"ii.{k}": v for k, v in r.part_ii.items()})
    return log.done("rel-lemma", r.consistent)


def relation_preorder(inp: Inputs) -> TheoremCheck:
    """Holds when the inputs witness that the relation is not a pre-order.

    With ``C`` the triple ``(A, B, C)`` is probed for a transitivity
    failure; the pair ``(A, B)`` is always probed for an antisymmetry failure.
    """
    inp.need("B")
    triples = [(inp.A, inp.B, inp.C)] if inp.C is not None else []
    report = preorder_probe(triples, inp.ctx, pairs=[(inp.A, inp.B)])
    log = _Log(inp.ctx)
    log.details.update(report.to_dict())
    log.verdicts["transitivity_violation"] = bool(report.transitivity_violations)
    log.verdicts["antisymmetry_violation"] = bool(report.antisymmetry_violations)
    log.residuals.update({k: 0.0 for k in log.verdicts})
    return log.done("rel-preorder", any(log.verdicts.values()))


THEOREMS: Dict[str, Callable[[Inputs], TheoremCheck]] = {
    "thm-defining-system": defining_system,
    "thm-geometric": geometric,
    "lem-projectors": projector_lemma,
    "thm-characterizations": characterizations,
    "thm-representations": representations,
    "thm-transfer": transfer,
    "thm-transfer-conditional": transfer_conditional,
    "thm-product": product,
    "thm-commutation": commutation,
    "thm-aw-commutation": aw_commutation,
    "lem-canonical": canonical,
    "cor-wg-representations": wg_corollary,
    "rel-right-block": relation_right_block,
    "rel-left-block": relation_left_block,
    "rel-lemma": relation_lemma,
    "rel-preorder": relation_preorder,
}

DESCRIPTIONS = {
    "thm-defining-system": "AWXWX = X and AWX = A^{cEP,W}WA (B if given, else the computed X)",
    "thm-geometric": "WAWB = P_{R(WA^{d,W}), N(A^{cEP,W}WA)} and R(B) in R(A^{d,W})",
    "lem-projectors": "AWXW, WAWX, XWAW, WXWA are projectors; X is the prescribed outer inverse of WAW",
    "thm-characterizations": "all characterizing condition sets agree on B",
    "thm-representations": "the eleven formulas for A^{wg,W} agree",
    "thm-transfer": "W A^{wg,W} = (WA)^wg and A^{wg,W} = A((WA)^wg)^2",
    "thm-transfer-conditional": "(AW)^wg = XW iff W2A3W3 = 0; X = ((AW)^wg)^2 A iff A2W3A3 = 0",
    "thm-product": "A^{wg,W} = (AW)^wg A (WA)^wg",
    "thm-commutation": "AWX = XWA iff block condition iff ((WA)^wg)^2 = ((WA)^2)^wg; then X = A^{d,W}",
    "thm-aw-commutation": "((AW)^wg)^2 = ((AW)^2)^wg iff (A1W2 + A2W3)A3W3 = 0",
    "lem-canonical": "block form of (A, W) and of the Drazin inverses of AW and WA",
    "cor-wg-representations": "the unweighted formulas for the weak group inverse agree",
    "rel-right-block": "right relation: direct test agrees with the block characterization",
    "rel-left-block": "left relation: direct test agrees with the block characterization",
    "rel-lemma": "equivalent forms of the two relation equations agree",
    "rel-preorder": "inputs witness failure of transitivity (A, B, C) or antisymmetry (A, B)",
}


def verify(theorem_id: str, inputs: Inputs) -> TheoremCheck:
    try:
        fn = THEOREMS[theorem_id]
    except KeyError:
        raise InputError(f"unknown theorem id {theorem_id!r}; "
                         f"choose from {', '.join(THEOREMS)}") from None
    return fn(inputs)


__all__ = ["DESCRIPTIONS", "Inputs", "THEOREMS", "TheoremCheck", "verify"]
