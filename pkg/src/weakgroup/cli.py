"""Command-line interface.

Every command writes one JSON report to standard output (or ``--out``).
Exit status: 0 success, 1 false verdict or failed check, 2 usage or input
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import enum
import hashlib
import json
import sys
from typing import Optional

import numpy as np

from . import __version__
from .conformance import GeneratorSpec, default_specs, run_suite
from .errors import GInverseError, InputError, NumericalError
from .ginverse import (
    core_ep,
    core_inverse,
    group_inverse,
    outer_inverse_prescribed,
    weak_group,
    weighted_core_ep,
    weighted_weak_group,
    wwg_representations,
)
from .matrixio import Format, matrix_to_json_obj, parse_matrix, serialize_matrix
from .numeric import (
    NumericContext,
    ctranspose,
    fro,
    moore_penrose,
    orthogonal_projector,
    range_basis,
    residual,
    zero_residual,
)
from .relations import Method, Side, wg_below, wwg_below
from .spectral import canonical_pair, check_pair, drazin, index, w_drazin
from .theorems import DESCRIPTIONS, Inputs, verify

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3

KINDS = ("mp", "group", "core", "drazin", "wdrazin", "coreep", "wcoreep", "wg", "wwg", "outer")
WEIGHTED_KINDS = ("wdrazin", "wcoreep", "wwg")
RELATIONS = {"wg": None, "wwg-r": Side.RIGHT, "wwg-l": Side.LEFT, "wwg": Side.BOTH}


class Report:
    """Accumulates one command's report document."""

    def __init__(self, argv, ctx: NumericContext, fmt: Format):
        self.ctx = ctx
        self.fmt = fmt
        self.doc = {"command": list(argv), "inputs": {}, "outputs": {},
                    "residuals": {}, "verdicts": {}}

    def add_input(self, label, path, data: bytes, M):
        self.doc["inputs"][label] = {"path": path, "sha256": hashlib.sha256(data).hexdigest(),
                                     "shape": list(M.shape)}

    def matrix(self, M, name=None):
        if self.fmt is Format.JSON:
            return matrix_to_json_obj(M, name)
        return serialize_matrix(M, Format.MATRIX_MARKET, name)

    def equal(self, label, L, R):
        self.doc["residuals"][label] = residual(L, R)
        self.doc["verdicts"][label] = self.ctx.close(L, R)

    def zero(self, label, V, scale):
        self.doc["residuals"][label] = zero_residual(V, scale)
        self.doc["verdicts"][label] = self.ctx.negligible(V, scale)

    def finish(self, passed: Optional[bool] = None) -> dict:
        if passed is None:
            passed = all(self.doc["verdicts"].values())
        self.doc["tolerances"] = {"eq_rtol": self.ctx.eq_rtol, "eq_atol": self.ctx.eq_atol,
                                  "rank_rtol": self.ctx.rank_rtol,
                                  "index_rtol": self.ctx.index_rtol,
                                  "max_index": self.ctx.max_index}
        self.doc["status"] = "pass" if passed else "fail"
        self.doc["version"] = __version__
        return _plain(self.doc, self)


def _plain(obj, report: Report):
    """Convert report content to JSON-ready values; matrices use the report format."""
    if isinstance(obj, dict):
        return {str(k): _plain(v, report) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v, report) for v in obj]
    if isinstance(obj, np.ndarray):
        return report.matrix(obj) if obj.ndim == 2 else _plain(obj.tolist(), report)
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if np.isfinite(x) else None
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict(), report)
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _load(report: Report, label: str, path: Optional[str], required: bool = True):
    if path is None:
        if required:
            raise InputError(f"this command needs -{label}")
        return None
    with open(path, "rb") as fh:
        data = fh.read()
    M = parse_matrix(data, path=path).matrix
    report.add_input(label, path, data, M)
    return M


# -- compute -------------------------------------------------------------------

def _power(M, k):
    return np.linalg.matrix_power(M, k)


def _outside(basis, X):
    """Component of the columns of ``X`` outside the subspace ``basis``."""
    return X - orthogonal_projector(basis) @ X


def _compute(kind, A, W, T, S, rep: Report, ctx: NumericContext):
    """Compute the requested inverse and record its defining equations."""
    if kind in WEIGHTED_KINDS:
        if W is None:
            raise InputError(f"'{kind}' needs a weight -W")
        A, W = check_pair(A, W, ctx)
    if kind == "mp":
        X = moore_penrose(A, ctx)
        rep.equal("AXA=A", A @ X @ A, A)
        rep.equal("XAX=X", X @ A @ X, X)
        rep.equal("(AX)*=AX", ctranspose(A @ X), A @ X)
        rep.equal("(XA)*=XA", ctranspose(X @ A), X @ A)
    elif kind == "group":
        X = group_inverse(A, ctx)
        rep.equal("AXA=A", A @ X @ A, A)
        rep.equal("XAX=X", X @ A @ X, X)
        rep.equal("AX=XA", A @ X, X @ A)
    elif kind == "core":
        X = core_inverse(A, ctx)
        rep.equal("AXA=A", A @ X @ A, A)
        rep.equal("(AX)*=AX", ctranspose(A @ X), A @ X)
        rep.equal("XA^2=A", X @ A @ A, A)
        rep.equal("AX^2=X", A @ X @ X, X)
    elif kind == "drazin":
        X = drazin(A, ctx)
        k = index(A, ctx).index
        rep.doc["outputs"]["index"] = k
        rep.equal("XAX=X", X @ A @ X, X)
        rep.equal("AX=XA", A @ X, X @ A)
        rep.equal("XA^(k+1)=A^k", X @ _power(A, k + 1), _power(A, k))
    elif kind == "wdrazin":
        X = w_drazin(A, W, ctx)
        AW = A @ W
        k = index(AW, ctx).index
        rep.doc["outputs"]["index_AW"] = k
        rep.equal("XWAWX=X", X @ W @ A @ W @ X, X)
        rep.equal("AWX=XWA", AW @ X, X @ W @ A)
        rep.equal("XW(AW)^(k+1)=(AW)^k", X @ W @ _power(AW, k + 1), _power(AW, k))
    elif kind == "coreep":
        X = core_ep(A, ctx)
        ind = index(A, ctx)
        k = ind.index
        rep.doc["outputs"]["index"] = k
        rep.equal("XAX=X", X @ A @ X, X)
        rep.equal("(AX)*=AX", ctranspose(A @ X), A @ X)
        rep.equal("XA^(k+1)=A^k", X @ _power(A, k + 1), _power(A, k))
        rep.zero("R(X)<=R(A^k)", _outside(ind.range, X), fro(X))
    elif kind == "wcoreep":
        X = weighted_core_ep(A, W, ctx)
        WAW = W @ A @ W
        ind = index(A @ W, ctx)
        rep.doc["outputs"]["index_AW"] = ind.index
        rep.equal("XWAWX=X", X @ WAW @ X, X)
        rep.equal("(WAWX)*=WAWX", ctranspose(WAW @ X), WAW @ X)
        rep.zero("R(X)<=R((AW)^k)", _outside(ind.range, X), fro(X))
    elif kind == "wg":
        X = weak_group(A, ctx)
        rep.equal("AX^2=X", A @ X @ X, X)
        rep.equal("AX=A^cEP A", A @ X, core_ep(A, ctx) @ A)
    elif kind == "wwg":
        X = weighted_weak_group(A, W, ctx)
        AW = A @ W
        rep.equal("AWXWX=X", AW @ X @ W @ X, X)
        rep.equal("AWX=A^cEP,W WA", AW @ X, weighted_core_ep(A, W, ctx) @ W @ A)
    else:  # outer
        if T is None or S is None:
            raise InputError("'outer' needs -T and -S (matrices whose columns span T and S)")
        m, n = A.shape
        if T.shape[0] != n or S.shape[0] != m:
            raise InputError(f"-T needs {n} rows and -S needs {m} rows for a {m}x{n} matrix")
        Tb, Sb = range_basis(T, ctx), range_basis(S, ctx)
        X = outer_inverse_prescribed(A, Tb, Sb, ctx)
        rep.equal("XAX=X", X @ A @ X, X)
        rep.zero("R(X)<=T", _outside(Tb, X), fro(X))
        rep.zero("XS=0", X @ Sb.frame, fro(X))
    rep.doc["outputs"]["kind"] = kind
    rep.doc["outputs"]["X"] = X


def cmd_compute(args, rep: Report, ctx):
    A = _load(rep, "A", args.A)
    W = _load(rep, "W", args.W, required=False)
    T = _load(rep, "T", args.T, required=False)
    S = _load(rep, "S", args.S, required=False)
    _compute(args.kind, A, W, T, S, rep, ctx)
    return rep.finish()


def cmd_routes(args, rep: Report, ctx):
    A = _load(rep, "A", args.A)
    W = _load(rep, "W", args.W)
    table = wwg_representations(A, W, ctx)
    rep.doc["outputs"]["routes"] = table.entries
    rep.doc["outputs"]["max_pairwise_residual"] = table.max_pairwise_residual
    for name, r in table.residuals_to_reference().items():
        rep.doc["residuals"][f"{name}-DEF"] = r
    rep.doc["residuals"]["max_pairwise"] = table.max_pairwise_residual
    ok = table.max_pairwise_residual <= ctx.eq_rtol
    rep.doc["verdicts"]["routes_agree"] = ok
    return rep.finish(ok)


def cmd_verify(args, rep: Report, ctx):
    if args.theorem not in DESCRIPTIONS:
        raise InputError(f"unknown theorem id {args.theorem!r}; "
                         f"choose from {', '.join(DESCRIPTIONS)}")
    inputs = Inputs(A=_load(rep, "A", args.A), W=_load(rep, "W", args.W, required=False),
                    B=_load(rep, "B", args.B, required=False),
                    C=_load(rep, "C", args.C, required=False), ctx=ctx)
    check = verify(args.theorem, inputs)
    rep.doc["outputs"].update(theorem=check.theorem_id, description=DESCRIPTIONS[args.theorem],
                              holds=check.holds, details=check.details)
    rep.doc["residuals"].update(check.residuals)
    rep.doc["verdicts"].update(check.verdicts)
    return rep.finish(check.holds)


def cmd_relation(args, rep: Report, ctx):
    A = _load(rep, "A", args.A)
    B = _load(rep, "B", args.B)
    side = RELATIONS[args.relation]
    if side is None:
        verdict = wg_below(A, B, ctx, method=args.method)
    else:
        W = _load(rep, "W", args.W)
        verdict = wwg_below(A, W, B, ctx, side=side, method=args.method)
    rep.doc["outputs"].update(relation=args.relation, method=args.method,
                              holds=verdict.holds)
    rep.doc["residuals"].update(first_equation=verdict.left_residual,
                                second_equation=verdict.right_residual)
    rep.doc["verdicts"]["holds"] = verdict.holds
    return rep.finish(verdict.holds)


def cmd_canon(args, rep: Report, ctx):
    A = _load(rep, "A", args.A)
    W = _load(rep, "W", args.W)
    A, W = check_pair(A, W, ctx)
    cp = canonical_pair(A, W, ctx)
    out = rep.doc["outputs"]
    out["core_dim"] = cp.core_dim
    for name in ("p1", "p2", "q1", "q2"):
        out[name] = getattr(cp, name).frame
    for name in ("A1", "A2", "A3", "W1", "W2", "W3", "T", "U"):
        out[name] = getattr(cp, name)
    rep.equal("A=Q[A1 A2; 0 A3]P*", cp.assemble_A(), A)
    rep.equal("W=P[W1 W2; 0 W3]Q*", cp.assemble_W(), W)
    return rep.finish()


def _read_specs(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if isinstance(obj, dict):
        obj = obj.get("specs")
    if not isinstance(obj, list) or not obj:
        raise InputError(f"{path}: expected a nonempty list of generator specs")
    for d in obj:
        if not isinstance(d, dict):
            raise InputError(f"{path}: each generator spec must be a JSON object")
    return [GeneratorSpec.from_dict(d) for d in obj]


def cmd_conform(args, rep: Report, ctx):
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    if args.jobs < 1:
        raise InputError("--jobs must be at least 1")
    specs = _read_specs(args.spec) if args.spec else default_specs()
    if args.spec:
        with open(args.spec, "rb") as fh:
            rep.doc["inputs"]["spec"] = {"path": args.spec,
                                         "sha256": hashlib.sha256(fh.read()).hexdigest()}
    suite = run_suite(specs, args.trials, args.seed, ctx, jobs=args.jobs)
    d = suite.to_dict()
    rep.doc["outputs"]["suite"] = {k: d[k] for k in ("seed", "trials", "specs", "failures")}
    for name, s in d["checks"].items():
        rep.doc["residuals"][name] = s["max_residual"]
        rep.doc["verdicts"][name] = s["failed"] == 0
    rep.doc["outputs"]["counts"] = {k: {"passed": v["passed"], "failed": v["failed"]}
                                    for k, v in d["checks"].items()}
    return rep.finish(suite.passed)


# -- parser ----------------------------------------------------------------------

def _theorem_help() -> str:
    width = max(len(k) for k in DESCRIPTIONS)
    return "theorem ids:\n" + "\n".join(f"  {k:<{width}}  {v}" for k, v in DESCRIPTIONS.items())


def _global_flags(defaults: bool) -> argparse.ArgumentParser:
    # subcommands repeat the flags without defaults so they never mask global ones
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p.add_argument("--tol", type=float, default=d(1e-8),
                   help="relative tolerance of identity checks (default 1e-8)")
    p.add_argument("--format", choices=[f.value for f in Format], default=d("json"),
                   help="encoding of matrices inside the report (default json)")
    p.add_argument("--out", default=d(None),
                   help="write the report here instead of standard output")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(False)

    parser = argparse.ArgumentParser(
        prog="weakgroup", parents=[_global_flags(True)],
        description="Weighted weak group inverse and related generalized inverses.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="compute a generalized inverse")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("-A", required=True, help="matrix file (JSON or Matrix Market)")
    p.add_argument("-W", help="weight, needed by wdrazin, wcoreep and wwg")
    p.add_argument("-T", help="outer: columns span the prescribed range")
    p.add_argument("-S", help="outer: columns span the prescribed null space")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("routes", parents=[common],
                       help="every representation of the weighted weak group inverse")
    p.add_argument("-A", required=True)
    p.add_argument("-W", required=True)
    p.set_defaults(func=cmd_routes)

    p = sub.add_parser("verify", parents=[common], help="check a statement on given matrices",
                       epilog=_theorem_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("theorem", metavar="theorem-id")
    p.add_argument("-A", required=True)
    p.add_argument("-W")
    p.add_argument("-B")
    p.add_argument("-C")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("relation", parents=[common], help="decide A <= B")
    p.add_argument("relation", choices=list(RELATIONS))
    p.add_argument("-A", required=True)
    p.add_argument("-B", required=True)
    p.add_argument("-W", help="weight, needed by the weighted relations")
    p.add_argument("--method", choices=[m.value for m in Method], default=Method.DIRECT.value)
    p.set_defaults(func=cmd_relation)

    p = sub.add_parser("canon", parents=[common], help="dump the canonical form of (A, W)")
    p.add_argument("-A", required=True)
    p.add_argument("-W", required=True)
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("conform", parents=[common], help="run the randomized conformance suite")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--spec", help="JSON list of generator specs (default: built-in mix)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output is unchanged")
    p.set_defaults(func=cmd_conform)
    return parser


_NOT_ECHOED = ("--out", "--jobs")


def _echo(argv):
    """The invocation minus flags that do not affect the report content."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a in _NOT_ECHOED:
            skip = True
        elif not a.startswith(tuple(f + "=" for f in _NOT_ECHOED)):
            out.append(a)
    return ["weakgroup", *out]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        ctx = NumericContext(eq_rtol=args.tol)
        rep = Report(_echo(argv), ctx, Format(args.format))
        doc = args.func(args, rep, ctx)
    except InputError as exc:
        print(f"weakgroup: input error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"weakgroup: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"weakgroup: numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except GInverseError as exc:
        print(f"weakgroup: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except OSError as exc:
        print(f"weakgroup: cannot write report: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK if doc["status"] == "pass" else EXIT_FALSE


if __name__ == "__main__":
    sys.exit(main())
