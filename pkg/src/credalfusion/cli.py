"""Command-line front end.

Three subcommands: ``fuse`` runs one fusion, ``check`` runs the randomized
containment check and ``sat`` decides a clause file through the
sum-of-products reduction.  Results go to stdout as JSON, diagnostics to
stderr.  Exit codes: 0 success, 1 bad input, 2 conflict, 3 containment
violation, 4 search guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import ds, interval, point
from .core import EPS, IntervalDistribution, MassFunction, outcomes_of
from .errors import ConflictError, CredalError, SearchGuardError
from .io import load_clauses, load_models, model_to_dict
from .oracle import FUSION_OPS, check_containment, oracle_ds_bounds, oracle_interval_bounds
from .sat import brute_force_sat, reduce_sat_to_sop, solve_sat_via_sop

EXIT_OK, EXIT_INPUT, EXIT_CONFLICT, EXIT_VIOLATION, EXIT_GUARD = 0, 1, 2, 3, 4


class UsageError(CredalError):
    """Flags that do not fit together."""


def _emit(doc: dict, stream) -> None:
    stream.write(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# fuse


def resolve_op(kind: str, mode: str, approach: str | None, sequential: bool) -> str:
    """Map CLI flags to a key of ``FUSION_OPS``."""
    if kind == "point":
        if approach not in (None, "point"):
            raise UsageError("point models only support --approach point")
        return f"point-{mode}"
    if approach == "point":
        raise UsageError("--approach point needs --kind point")
    if mode == "context":
        if approach not in (None, "1"):
            raise UsageError("context fusion has a single algorithm; drop --approach or use 1")
        if sequential:
            raise UsageError("--sequential is not available for context fusion of credal sets")
        return f"{kind}-context"
    if approach == "dempster":
        if kind != "ds":
            raise UsageError("--approach dempster needs --kind ds")
        return "dempster"
    if approach == "2":
        if sequential:
            raise UsageError("--sequential is only available with approach 1")
        return f"{kind}-a2"
    return f"{kind}-a1-pairwise" if sequential else f"{kind}-a1"


def _load_inputs(args, kind: str, mode: str, eps: float):
    if mode == "context":
        if not args.prior or not args.likelihoods:
            raise UsageError("context fusion needs --prior and --likelihoods")
        if args.inputs:
            raise UsageError("--inputs is for general fusion")
        prior = load_models([args.prior], kind, eps)
        if len(prior) != 1:
            raise UsageError("--prior must hold exactly one model")
        lik = load_models([args.likelihoods], "likelihoods", eps)
        if len(lik) != 1:
            raise UsageError("--likelihoods must hold exactly one matrix")
        lik = lik[0]
        if lik.M != prior[0].M:
            raise UsageError(f"likelihoods cover M={lik.M} outcomes, prior covers {prior[0].M}")
        if kind == "point" and not np.array_equal(lik.lower, lik.upper):
            raise UsageError("point fusion needs exact likelihoods (use 'values')")
        return prior[0], lik
    if not args.inputs:
        raise UsageError("general fusion needs --inputs")
    if args.prior or args.likelihoods:
        raise UsageError("--prior/--likelihoods are for context fusion")
    return load_models(args.inputs, kind, eps)


def _widths(model) -> list:
    if isinstance(model, IntervalDistribution):
        return (model.upper - model.lower).tolist()
    if isinstance(model, MassFunction):
        singles = 1 << np.arange(model.M)
        return (model.plausibility_table()[singles] - model.belief_table()[singles]).tolist()
    return [0.0] * model.M


def _raw_interval_bounds(op: str, inputs, eps: float):
    if op == "interval-context":
        return interval.context_specific_interval_bounds(inputs[0], inputs[1], eps)
    if op == "interval-a1":
        return interval.general_interval_a1_bounds(inputs, eps)
    if op == "interval-a2":
        return interval.general_interval_a2_bounds(inputs, eps)
    return None


def _oracle_report(op: str, inputs, result) -> dict:
    spec = FUSION_OPS[op]
    if spec.kind == "point":
        return {"skipped": "point fusion is exact"}
    try:
        if spec.kind == "interval":
            o = oracle_interval_bounds(spec.mode, inputs)
            return {
                "lower": o.lower.tolist(),
                "upper": o.upper.tolist(),
                "lower_gap": (o.lower - result.lower).tolist(),
                "upper_gap": (result.upper - o.upper).tolist(),
                "corner_count": o.corner_count,
            }
        o = oracle_ds_bounds(spec.mode, inputs)
        bel, pl = result.belief_table(), result.plausibility_table()
        subsets = [list(outcomes_of(k)) for k in range(1, 1 << result.M)]
        return {
            "subsets": subsets,
            "belief": o.lower[1:].tolist(),
            "plausibility": o.upper[1:].tolist(),
            "belief_gap": (o.lower[1:] - bel[1:]).tolist(),
            "plausibility_gap": (pl[1:] - o.upper[1:]).tolist(),
            "corner_count": o.corner_count,
        }
    except CredalError as exc:
        return {"skipped": str(exc)}


def run_fuse(args, out=sys.stdout, err=sys.stderr) -> int:
    eps = args.tolerance
    op = resolve_op(args.kind, args.mode, args.approach, args.sequential)
    inputs = _load_inputs(args, args.kind, args.mode, eps)
    spec = FUSION_OPS[op]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ds.DegenerateFusionWarning)
        if args.kind == "point" and args.sequential:
            if args.mode == "context":
                result = point.fuse_sequential_point("context", inputs[1].lower, prior=inputs[0], eps=eps)
            else:
                result = point.fuse_sequential_point("general", inputs, eps=eps)
        else:
            result = spec.run(inputs, eps)
    diagnostics: dict = {"op": op, "containment_guaranteed": spec.guaranteed, "widths": _widths(result)}
    raw = _raw_interval_bounds(op, inputs, eps)
    if raw is not None:
        diagnostics["tightening_changed"] = bool(
            np.any(np.abs(raw[0] - result.lower) > eps) or np.any(np.abs(raw[1] - result.upper) > eps)
        )
    if caught:
        diagnostics["warnings"] = [str(w.message) for w in caught]
    if args.oracle:
        diagnostics["oracle"] = _oracle_report(op, inputs, result)
    _emit(model_to_dict(result, label=f"fused ({op})"), out)
    _emit(diagnostics, err)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check


def run_check(args, out=sys.stdout, err=sys.stderr) -> int:
    spec = FUSION_OPS[args.op]
    eps = args.tolerance
    inputs = _load_inputs(args, spec.kind, spec.mode, eps)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ds.DegenerateFusionWarning)
        report = check_containment(args.op, inputs, trials=args.trials, seed=args.seed, eps=eps)
    _emit(
        {
            "op": report.op,
            "trials": report.trials,
            "seed": report.seed,
            "containment_guaranteed": spec.guaranteed,
            "skipped": report.skipped,
            "violation_count": report.violation_count,
            "passed": report.passed,
            "violations": report.violations,
        },
        out,
    )
    err.write(report.summary() + "\n")
    return EXIT_OK if report.passed else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# sat


def run_sat(args, out=sys.stdout, err=sys.stderr) -> int:
    s = load_clauses(args.clauses)
    satisfiable, r, assignment = solve_sat_via_sop(s, max_rows=args.max_rows)
    doc: dict = {
        "n": s.n,
        "m": s.m,
        "satisfiable": satisfiable,
        "r": r if np.isfinite(r) else None,
        "assignment": list(assignment) if assignment is not None else None,
    }
    if args.dump:
        inst = reduce_sat_to_sop(s)
        doc["reduced"] = {"a": inst.a.tolist(), "b": inst.b.tolist(), "c": inst.c.tolist(), "sense": inst.sense}
    _emit(doc, out)
    if s.n <= 20:
        err.write(f"brute-force cross-check: {'agrees' if brute_force_sat(s) == satisfiable else 'DISAGREES'}\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags, which would read as a conflict here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="credalfusion", description="Fuse credal sets and check containment.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def model_args(p):
        p.add_argument("--prior", help="prior model file (context mode)")
        p.add_argument("--likelihoods", help="likelihood matrix file (context mode)")
        p.add_argument("--inputs", nargs="+", help="input model files (general mode)")
        p.add_argument("--tolerance", type=float, default=EPS, help="absolute tolerance (default %(default)g)")

    fuse = sub.add_parser("fuse", help="fuse models and print the fused model")
    fuse.add_argument("--mode", choices=["context", "general"], required=True)
    fuse.add_argument("--kind", choices=["point", "interval", "ds"], required=True)
    fuse.add_argument("--approach", choices=["1", "2", "dempster", "point"])
    fuse.add_argument("--sequential", action="store_true", help="fold inputs one at a time")
    fuse.add_argument("--oracle", action="store_true", help="compare against brute-force bounds when small enough")
    model_args(fuse)
    fuse.set_defaults(func=run_fuse)

    check = sub.add_parser("check", help="randomized containment check of one fusion op")
    check.add_argument("--op", choices=sorted(FUSION_OPS), required=True)
    check.add_argument("--trials", type=int, default=500)
    check.add_argument("--seed", type=int, default=0)
    model_args(check)
    check.set_defaults(func=run_check)

    sat = sub.add_parser("sat", help="decide a clause file via the sum-of-products reduction")
    sat.add_argument("--clauses", required=True)
    sat.add_argument("--dump", action="store_true", help="include the reduced a/b/c matrices")
    sat.add_argument("--max-rows", type=int, default=12, help="cap on variables + clauses")
    sat.set_defaults(func=run_sat)
    return parser


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args, out, err)
    except ConflictError as exc:
        err.write(f"conflict: {exc}\n")
        return EXIT_CONFLICT
    except SearchGuardError as exc:
        err.write(f"guard exceeded: {exc}\n")
        return EXIT_GUARD
    except CredalError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
