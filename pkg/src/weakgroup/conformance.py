"""Random pairs with planted canonical structure, and the conformance suite."""

from __future__ import annotations

import enum
import itertools
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Sequence, Tuple, Union

import numpy as np

from .errors import DegenerateDraw, GInverseError, InputError
from .numeric import NumericContext, SubspaceBasis, ctranspose, moore_penrose
from .spectral import CanonicalPair, series_TU

SeedLike = Union[int, Sequence[int]]

COND_LIMIT = 1e2
MAX_REDRAWS = 100


class Plant(str, enum.Enum):
    """Structural constraints imposed on the drawn blocks.

    Constraints on ``W2`` are applied before those on ``A2``; when two flags
    pull on the same block the later one wins.
    """

    A2_ZERO = "A2_ZERO"
    W2_ZERO = "W2_ZERO"
    # (W1 A2 + W2 A3) W3 A3 = 0
    COMMUTING_CONDITION = "COMMUTING_CONDITION"
    # (A1 W2 + A2 W3) A3 W3 = 0
    AW_COMMUTING_CONDITION = "AW_COMMUTING_CONDITION"
    # W2 A3 W3 = 0
    TRANSFER_RIGHT = "TRANSFER_RIGHT"
    # A2 W3 A3 = 0
    TRANSFER_LEFT = "TRANSFER_LEFT"
    # derived relation triples are positive instances only
    RELATION_POSITIVE = "RELATION_POSITIVE"


@dataclass(frozen=True)
class GeneratorSpec:
    core_dim: int
    nil_dim_x: int = 0
    nil_dim_y: int = 0
    magnitude: float = 1.0
    plant: FrozenSet[Plant] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.core_dim < 1:
            raise InputError("core_dim must be at least 1")
        if self.nil_dim_x < 0 or self.nil_dim_y < 0:
            raise InputError("nilpotent dimensions must be nonnegative")
        if not self.magnitude > 0:
            raise InputError("magnitude must be positive")
        object.__setattr__(self, "plant", frozenset(Plant(p) for p in self.plant))

    @property
    def shape(self) -> Tuple[int, int]:
        """Shape of ``A``; ``W`` has the transposed shape."""
        return (self.core_dim + self.nil_dim_y, self.core_dim + self.nil_dim_x)

    def to_dict(self) -> dict:
        return {
            "core_dim": self.core_dim,
            "nil_dim_x": self.nil_dim_x,
            "nil_dim_y": self.nil_dim_y,
            "magnitude": self.magnitude,
            "plant": sorted(p.value for p in self.plant),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        unknown = set(d) - {"core_dim", "nil_dim_x", "nil_dim_y", "magnitude", "plant"}
        if unknown:
            raise InputError(f"unknown generator spec fields: {sorted(unknown)}")
        try:
            return cls(core_dim=int(d["core_dim"]),
                       nil_dim_x=int(d.get("nil_dim_x", 0)),
                       nil_dim_y=int(d.get("nil_dim_y", 0)),
                       magnitude=float(d.get("magnitude", 1.0)),
                       plant=frozenset(d.get("plant", ())))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad generator spec {d!r}: {exc}") from exc


@dataclass(frozen=True)
class GroundTruth:
    spec: GeneratorSpec
    pair: CanonicalPair
    A: np.ndarray
    W: np.ndarray
    wwg_closed_form: np.ndarray
    wdrazin_closed_form: np.ndarray
    wcoreep_closed_form: np.ndarray


def make_rng(seed: SeedLike) -> np.random.Generator:
    """Counter-based stream; ``seed`` may be an int or a tuple such as (seed, trial)."""
    if isinstance(seed, (int, np.integer)):
        entropy = int(seed)
    else:
        entropy = [int(s) for s in seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _uniform(rng, shape, magnitude):
    return (rng.uniform(-magnitude, magnitude, shape)
            + 1j * rng.uniform(-magnitude, magnitude, shape))


def random_unitary(rng, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    return Q * (d / np.abs(d))


def _invertible(rng, n, magnitude):
    for _ in range(MAX_REDRAWS):
        M = _uniform(rng, (n, n), magnitude)
        if np.linalg.cond(M) <= COND_LIMIT:
            return M
    raise DegenerateDraw(f"no well-conditioned {n}x{n} block in {MAX_REDRAWS} draws")


def _core_separation(A1, A2, A3, W1, W2, W3) -> float:
    """``max(|AW| |(A1 W1)^-1|, |WA| |(W1 A1)^-1|)`` in the spectral norm.

    Small core eigenvalues next to a long nilpotent chain make the split
    into core and nilpotent parts ill-conditioned even when ``A1`` and
    ``W1`` are; this ratio measures how far the core sits from zero on the
    scale of the whole product.
    """
    AW = np.block([[A1 @ W1, A1 @ W2 + A2 @ W3],
                   [np.zeros((A3.shape[0], A1.shape[0])), A3 @ W3]])
    WA = np.block([[W1 @ A1, W1 @ A2 + W2 @ A3],
                   [np.zeros((W3.shape[0], A1.shape[0])), W3 @ A3]])
    return max(np.linalg.norm(AW, 2) * np.linalg.norm(np.linalg.inv(A1 @ W1), 2),
               np.linalg.norm(WA, 2) * np.linalg.norm(np.linalg.inv(W1 @ A1), 2))


def _annihilator(N):
    """``I - N N^+``, so that ``(I - N N^+) N = 0`` and ``Y (I - N N^+)`` kills ``N`` from the right."""
    if N.size == 0:
        return np.eye(N.shape[0], dtype=complex)
    return np.eye(N.shape[0], dtype=complex) - N @ moore_penrose(N)


def nilpotent_blocks(rng, ny: int, nx: int, magnitude: float):
    """``A3`` strictly upper and ``W3`` upper triangular, so both products are nilpotent."""
    A3 = np.triu(_uniform(rng, (ny, nx), magnitude), k=1)
    W3 = np.triu(_uniform(rng, (nx, ny), magnitude), k=0)
    return A3, W3


def _frames(P, k):
    n = P.shape[0]
    return SubspaceBasis(n, P[:, :k]), SubspaceBasis(n, P[:, k:])


def pair_from_blocks(p1, p2, q1, q2, A1, A2, A3, W1, W2, W3) -> CanonicalPair:
    k = A1.shape[0]
    partial = CanonicalPair(p1, p2, q1, q2, A1, A2, A3, W1, W2, W3,
                            np.zeros((k, q2.dim), dtype=complex),
                            np.zeros((k, p2.dim), dtype=complex))
    T, U = series_TU(partial)
    return CanonicalPair(p1, p2, q1, q2, A1, A2, A3, W1, W2, W3, T, U)


def closed_forms(cp: CanonicalPair):
    """Weighted weak group, W-weighted Drazin and weighted core-EP inverses from blocks."""
    A1, A2, A3, W1, W2 = cp.A1, cp.A2, cp.A3, cp.W1, cp.W2
    W1inv = np.linalg.inv(W1)
    core = np.linalg.inv(W1 @ A1 @ W1)
    AW1inv = np.linalg.inv(A1 @ W1)
    wwg = cp.to_y_x(core, AW1inv @ AW1inv @ (A2 + W1inv @ W2 @ A3))
    wdrazin = cp.to_y_x(core, W1inv @ cp.U)
    wcoreep = cp.to_y_x(core)
    return wwg, wdrazin, wcoreep


def _draw_blocks(rng, spec: GeneratorSpec):
    k, nx, ny, mag = spec.core_dim, spec.nil_dim_x, spec.nil_dim_y, spec.magnitude
    A1 = _invertible(rng, k, mag)
    W1 = _invertible(rng, k, mag)
    A2 = _uniform(rng, (k, nx), mag)
    W2 = _uniform(rng, (k, ny), mag)
    A3, W3 = nilpotent_blocks(rng, ny, nx, mag)

    plant = spec.plant
    if Plant.W2_ZERO in plant:
        W2 = np.zeros_like(W2)
    if Plant.TRANSFER_RIGHT in plant:
        W2 = W2 @ _annihilator(A3 @ W3)
    if Plant.AW_COMMUTING_CONDITION in plant:
        W2 = np.linalg.solve(A1, -A2 @ W3 + (A1 @ W2) @ _annihilator(A3 @ W3))
    if Plant.A2_ZERO in plant:
        A2 = np.zeros_like(A2)
    if Plant.TRANSFER_LEFT in plant:
        A2 = A2 @ _annihilator(W3 @ A3)
    if Plant.COMMUTING_CONDITION in plant:
        A2 = np.linalg.solve(W1, -W2 @ A3 + (W1 @ A2) @ _annihilator(W3 @ A3))
    return A1, A2, A3, W1, W2, W3


def generate_pair(spec: GeneratorSpec, seed: SeedLike) -> GroundTruth:
    """Random pair with the planted block structure and its closed-form inverses.

    Draws are rejected while ``A1`` or ``W1`` has condition number above
    ``COND_LIMIT`` or the core separation exceeds it.
    """
    rng = make_rng(seed)
    k, nx, ny = spec.core_dim, spec.nil_dim_x, spec.nil_dim_y
    P = random_unitary(rng, k + nx)
    Q = random_unitary(rng, k + ny)
    p1, p2 = _frames(P, k)
    q1, q2 = _frames(Q, k)
    for _ in range(MAX_REDRAWS):
        blocks = _draw_blocks(rng, spec)
        if _core_separation(*blocks) <= COND_LIMIT:
            break
    else:
        raise DegenerateDraw(f"no draw with core separation <= {COND_LIMIT:g} "
                             f"in {MAX_REDRAWS} attempts")
    A1, A2, A3, W1, W2, W3 = blocks

    cp = pair_from_blocks(p1, p2, q1, q2, A1, A2, A3, W1, W2, W3)
    A = cp.assemble_A()
    W = cp.assemble_W()
    wwg, wdrazin, wcoreep = closed_forms(cp)
    for M in (A, W, wwg, wdrazin, wcoreep):
        M.setflags(write=False)
    return GroundTruth(spec, cp, A, W, wwg, wdrazin, wcoreep)


def random_square(rng, core_dim: int, nil_dim: int, magnitude: float = 1.0) -> np.ndarray:
    """Square matrix with an invertible core of size ``core_dim`` and a nilpotent part."""
    n = core_dim + nil_dim
    Q = random_unitary(rng, n)
    A1 = _invertible(rng, core_dim, magnitude) if core_dim else np.zeros((0, 0))
    A2 = _uniform(rng, (core_dim, nil_dim), magnitude)
    A3 = np.triu(_uniform(rng, (nil_dim, nil_dim), magnitude), k=1)
    M = np.block([[A1, A2], [np.zeros((nil_dim, core_dim)), A3]])
    return Q @ M @ ctranspose(Q)


def relation_triple(truth: GroundTruth, side: str, positive: bool, seed: SeedLike) -> np.ndarray:
    """A matrix ``B`` for which ``A`` is (or is not) below ``B`` on the given side.

    Positive instances solve the block conditions exactly: on the right
    ``B1 = A1``, ``B4 = 0`` and ``B2 = A2 + H L (A3 - B3) + Y (I - W3 W3^+)``;
    on the left ``B4 = (I - W3^+ W3) Y``, ``B1 = A1 - W1^-1 W2 B4`` and ``B2``
    from ``A3 - B3``.  Negative instances add a unit perturbation to ``B2``
    that the conditions detect, or to ``B1`` when ``B2`` is empty.
    """
    if side not in ("RIGHT", "LEFT"):
        raise InputError(f"side must be RIGHT or LEFT, got {side!r}")
    rng = make_rng(seed)
    cp = truth.pair
    mag = truth.spec.magnitude
    A1, A2, A3, W1, W2, W3 = cp.A1, cp.A2, cp.A3, cp.W1, cp.W2, cp.W3
    k, nx, ny = A1.shape[0], A2.shape[1], A3.shape[0]
    B3 = _uniform(rng, (ny, nx), mag)
    Y = _uniform(rng, (k, nx), mag)
    if side == "RIGHT":
        HL = np.linalg.solve(A1 @ W1, A1 @ W2 + A2 @ W3)
        B1 = A1.copy()
        B4 = np.zeros((ny, k), dtype=complex)
        B2 = A2 + HL @ (A3 - B3) + Y @ _annihilator(W3)
    else:
        B4 = _annihilator(ctranspose(W3)) @ _uniform(rng, (ny, k), mag)
        B1 = A1 - np.linalg.solve(W1, W2 @ B4)
        GK = np.linalg.solve(W1 @ A1 @ W1, W1 @ A2 + W2 @ A3)
        B2 = A2 + np.linalg.solve(W1, W2 @ (A3 - B3)) + GK @ W3 @ (A3 - B3)
    if not positive:
        if side == "RIGHT":
            # E = Y W3^* gives E W3 = Y W3^* W3, nonzero whenever W3 is
            E = _uniform(rng, (k, ny), 1.0) @ ctranspose(W3)
        else:
            E = _uniform(rng, (k, nx), 1.0)
        if nx and np.linalg.norm(E @ W3 if side == "RIGHT" else E) > 1e-3:
            B2 = B2 + E / np.linalg.norm(E)
        else:
            E1 = _uniform(rng, (k, k), 1.0)
            B1 = B1 + E1 / np.linalg.norm(E1)
    B = cp.to_y_x(B1, B2, B4, B3)
    B.setflags(write=False)
    return B


# -- the conformance suite -----------------------------------------------------

PLANT_MIX = (
    frozenset(),
    frozenset({Plant.A2_ZERO}),
    frozenset({Plant.W2_ZERO}),
    frozenset({Plant.A2_ZERO, Plant.W2_ZERO}),
    frozenset({Plant.COMMUTING_CONDITION}),
    frozenset({Plant.AW_COMMUTING_CONDITION}),
    frozenset({Plant.TRANSFER_RIGHT}),
    frozenset({Plant.TRANSFER_LEFT}),
    frozenset({Plant.TRANSFER_RIGHT, Plant.TRANSFER_LEFT}),
    frozenset({Plant.RELATION_POSITIVE}),
    frozenset({Plant.COMMUTING_CONDITION, Plant.TRANSFER_RIGHT}),
)


def default_specs(max_core: int = 6, max_nil: int = 4) -> List[GeneratorSpec]:
    """Every size combination up to the bounds, cycling through ``PLANT_MIX``."""
    sizes = itertools.product(range(1, max_core + 1), range(max_nil + 1), range(max_nil + 1))
    return [GeneratorSpec(k, nx, ny, plant=PLANT_MIX[(7 * i) % len(PLANT_MIX)])
            for i, (k, nx, ny) in enumerate(sizes)]


SUITE_CHECKS = (
    "oracle.wwg", "oracle.wdrazin", "oracle.wcoreep",
    "routes",
    "thm-defining-system", "thm-geometric", "lem-projectors", "thm-characterizations",
    "thm-characterizations.negative", "thm-transfer", "thm-transfer-conditional",
    "thm-product", "lem-canonical", "cor-wg-representations",
    "thm-commutation", "thm-aw-commutation", "commutation.planted",
    "rel-right-block", "rel-left-block", "relation.planted",
)


@dataclass(frozen=True)
class CheckOutcome:
    passed: bool
    residual: float
    message: str = ""


def _small_residual(check) -> float:
    """Largest residual among the conditions that came out true."""
    vals = [v for k, v in check.residuals.items()
            if check.verdicts.get(k, check.verdicts.get(k.split(".")[0], False))]
    return max(vals, default=0.0)


def _trial_outcomes(spec: GeneratorSpec, seed: int, trial: int,
                    ctx: NumericContext) -> Dict[str, CheckOutcome]:
    # imported here to keep the generator importable without the full stack
    from .ginverse import WeightedParts, wwg_representations
    from .numeric import residual
    from .relations import relation_block_analysis
    from .theorems import Inputs, verify

    out: Dict[str, CheckOutcome] = {}

    def record(name, fn):
        try:
            out[name] = fn()
        except GInverseError as exc:
            out[name] = CheckOutcome(False, float("nan"), f"{type(exc).__name__}: {exc}")

    try:
        truth = generate_pair(spec, (seed, trial))
        parts = WeightedParts.compute(truth.A, truth.W, ctx)
    except GInverseError as exc:
        msg = f"{type(exc).__name__}: {exc}"
        return {name: CheckOutcome(False, float("nan"), msg) for name in SUITE_CHECKS}
    inp = Inputs(truth.A, truth.W, ctx=ctx, _parts=parts)

    def oracle(computed, closed):
        r = residual(computed, closed)
        return CheckOutcome(ctx.close(computed, closed), r)

    record("oracle.wwg", lambda: oracle(parts.wwg, truth.wwg_closed_form))
    record("oracle.wdrazin", lambda: oracle(parts.wdrazin, truth.wdrazin_closed_form))
    record("oracle.wcoreep", lambda: oracle(parts.wcoreep, truth.wcoreep_closed_form))

    def routes():
        table = wwg_representations(truth.A, truth.W, ctx, parts)
        r = table.max_pairwise_residual
        return CheckOutcome(r <= ctx.eq_rtol, r)
    record("routes", routes)

    def theorem(theorem_id, inputs=inp):
        c = verify(theorem_id, inputs)
        return CheckOutcome(c.holds, _small_residual(c))

    for tid in ("thm-defining-system", "thm-geometric", "lem-projectors", "thm-transfer",
                "thm-product", "lem-canonical", "cor-wg-representations",
                "thm-commutation", "thm-aw-commutation"):
        record(tid, lambda tid=tid: theorem(tid))

    def characterizations():
        c = verify("thm-characterizations", inp)
        return CheckOutcome(c.holds and c.details["is_wwg"], _small_residual(c))
    record("thm-characterizations", characterizations)

    def characterizations_negative():
        rng = make_rng((seed, trial, 2))
        E = _uniform(rng, parts.wwg.shape, 1.0)
        B = parts.wwg + 1e-3 * (1.0 + np.linalg.norm(parts.wwg)) * E / np.linalg.norm(E)
        c = verify("thm-characterizations",
                   Inputs(truth.A, truth.W, B=B, ctx=ctx, _parts=parts))
        return CheckOutcome(c.holds and not any(c.details["outcomes"].values()), 0.0)
    record("thm-characterizations.negative", characterizations_negative)

    def transfer_conditional():
        c = verify("thm-transfer-conditional", inp)
        # the expectation comes from the planted blocks, not the recovered ones
        cp = truth.pair
        right = ctx.negligible(cp.W2 @ cp.A3 @ cp.W3,
                               np.linalg.norm(cp.W2) * np.linalg.norm(cp.A3) * np.linalg.norm(cp.W3))
        left = ctx.negligible(cp.A2 @ cp.W3 @ cp.A3,
                              np.linalg.norm(cp.A2) * np.linalg.norm(cp.W3) * np.linalg.norm(cp.A3))
        ok = (c.holds and c.details["right_identity"] == right
              and c.details["left_identity"] == left)
        return CheckOutcome(ok, _small_residual(c))
    record("thm-transfer-conditional", transfer_conditional)

    def commutation_planted():
        c = verify("thm-commutation", inp)
        expect = (Plant.COMMUTING_CONDITION in spec.plant
                  or {Plant.A2_ZERO, Plant.W2_ZERO} <= spec.plant)
        ok = not expect or (c.verdicts["commutes"] and c.verdicts["equals_wdrazin"])
        return CheckOutcome(ok, _small_residual(c))
    record("commutation.planted", commutation_planted)

    rng = make_rng((seed, trial, 1))
    positive = {side: Plant.RELATION_POSITIVE in spec.plant or bool(rng.integers(0, 2))
                for side in ("RIGHT", "LEFT")}
    triples = {}
    for side in ("RIGHT", "LEFT"):
        try:
            triples[side] = relation_triple(truth, side, positive[side], (seed, trial, 3, side == "LEFT"))
        except GInverseError:
            pass

    def relation_check(side):
        B = triples[side]
        tid = "rel-right-block" if side == "RIGHT" else "rel-left-block"
        c = verify(tid, Inputs(truth.A, truth.W, B=B, ctx=ctx, _parts=parts))
        return CheckOutcome(c.holds, _small_residual(c))
    record("rel-right-block", lambda: relation_check("RIGHT"))
    record("rel-left-block", lambda: relation_check("LEFT"))

    def relation_planted():
        ok, worst = True, 0.0
        for side, B in triples.items():
            r = relation_block_analysis(truth.A, truth.W, B, ctx)
            got = r.direct_right if side == "RIGHT" else r.direct_left
            ok = ok and got == positive[side]
        return CheckOutcome(ok and len(triples) == 2, worst)
    record("relation.planted", relation_planted)
    return out


def _trial_job(args):
    specs, seed, trial, ctx = args
    spec = specs[trial % len(specs)]
    return trial, spec, _trial_outcomes(spec, seed, trial, ctx)


@dataclass
class CheckSummary:
    passed: int = 0
    failed: int = 0
    max_residual: float = 0.0


@dataclass(frozen=True)
class SuiteReport:
    seed: int
    trials: int
    specs: Tuple[GeneratorSpec, ...]
    ctx: NumericContext
    checks: Dict[str, CheckSummary]
    failures: Tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        def num(x):
            # fixed precision keeps the document stable and readable
            return None if x != x else float(f"{x:.6e}")
        return {
            "seed": self.seed,
            "trials": self.trials,
            "specs": [s.to_dict() for s in self.specs],
            "tolerances": {"eq_rtol": self.ctx.eq_rtol, "eq_atol": self.ctx.eq_atol,
                           "rank_rtol": self.ctx.rank_rtol, "index_rtol": self.ctx.index_rtol,
                           "max_index": self.ctx.max_index},
            "checks": {k: {"passed": v.passed, "failed": v.failed,
                           "max_residual": num(v.max_residual)}
                       for k, v in self.checks.items()},
            "failures": [dict(f, residual=num(f["residual"])) for f in self.failures],
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def run_suite(specs: Sequence[GeneratorSpec], trials: int, seed: int,
              ctx: NumericContext = None, jobs: int = 1) -> SuiteReport:
    """Generate ``trials`` pairs and check every statement on each.

    Trial ``t`` uses ``specs[t % len(specs)]`` and the random stream
    ``(seed, t)``, so results do not depend on ``jobs``; outcomes are reduced
    in trial order.
    """
    from .numeric import DEFAULT_CONTEXT

    ctx = DEFAULT_CONTEXT if ctx is None else ctx
    specs = tuple(specs)
    if trials < 1:
        raise InputError("trials must be at least 1")
    if not specs:
        raise InputError("at least one generator spec is needed")
    args = [(specs, seed, t, ctx) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_trial_job, args, chunksize=max(1, trials // (4 * jobs))))
    else:
        results = [_trial_job(a) for a in args]
    checks = {name: CheckSummary() for name in SUITE_CHECKS}
    failures = []
    for trial, spec, outcomes in sorted(results, key=lambda r: r[0]):
        for name, o in outcomes.items():
            s = checks[name]
            if o.passed:
                s.passed += 1
                s.max_residual = max(s.max_residual, o.residual)
            else:
                s.failed += 1
                failures.append({"trial": trial, "check": name, "spec": spec.to_dict(),
                                 "residual": o.residual, "message": o.message})
    return SuiteReport(seed, trials, specs, ctx, checks, tuple(failures))
