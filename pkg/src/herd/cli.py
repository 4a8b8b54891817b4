"""``herd`` command line: analyze | check | walksets | branching | simulate.

Exit codes: 0 success, 1 request cannot be met (e.g. simulating a non-herdable
set), 2 usage or parse error, 3 internal inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

from .herdability import (
    BranchingAnalysis,
    HerdabilityVerdict,
    SignHerdabilityReport,
    analyze_branching,
    check_set,
    completely_herdable,
    herdable_states,
    positive_system_verdict,
    sign_herdable,
    unisigned_sufficient,
)
from .linsys import controllability_matrix, is_positive_system, range_basis
from .model import (
    FormatError,
    LinearSystem,
    SignedDigraph,
    format_rational,
    graph_to_sign_pattern,
    input_node,
    load_model,
    restrict_to_input,
    state,
    system_to_graph,
)
from .synthesis import PreconditionError, SynthesisConfig, synthesize
from .validation import check_state_set, parse_index_list
from .walks import WalkSets, compute_walk_sets, reachability

EXIT_OK = 0
EXIT_UNMET = 1
EXIT_USAGE = 2
EXIT_INCONSISTENT = 3


class InconsistencyError(RuntimeError):
    pass


# --- serialisation --------------------------------------------------------

def _labels(indices) -> list[str]:
    return [state(i).label for i in sorted(indices)]


def _one_based(indices) -> list[int]:
    return [i + 1 for i in sorted(indices)]


def verdict_to_dict(v: HerdabilityVerdict) -> dict[str, Any]:
    out: dict[str, Any] = {"set": _one_based(v.query_set), "herdable": v.herdable}
    if v.witness is not None:
        out["witness"] = [format_rational(a) for a in v.witness]
    if v.certificate is not None:
        out["certificate"] = [format_rational(a) for a in v.certificate]
    return out


def sign_report_to_dict(r: SignHerdabilityReport) -> dict[str, Any]:
    return {
        "completely_sign_herdable": r.completely_sign_herdable,
        "assignment": {state(i).label: {"input": input_node(j).label, "depth": d}
                       for i, (j, d) in r.assignment.items()},
        "uncovered": _labels(r.uncovered),
    }


def walk_sets_to_list(ws: WalkSets, inputs: Sequence[int] | None = None) -> list[dict[str, Any]]:
    return [{"input": input_node(j).label, "depth": d, "P": _labels(P), "N": _labels(N)}
            for j, d, P, N in ws.layers() if inputs is None or j in inputs]


def branching_to_dict(b: BranchingAnalysis, root_label: str = "u1") -> dict[str, Any]:
    if not b.is_out_branching:
        return {"is_out_branching": False}
    return {
        "is_out_branching": True,
        "root_input": root_label,
        "d_max": b.d_max,
        "layers": [{"depth": d, "P": _labels(P), "N": _labels(N)}
                   for d, (P, N) in enumerate(b.layers, start=1)],
        "maximal_families": [_one_based(f) for f in b.maximal_families],
        "families": [_one_based(f) for f in b.families],
        "families_truncated": b.families_truncated,
        "max_herdable_size": b.max_herdable_size,
        "k_walk_size": b.k_walk_size,
    }


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


# --- commands -------------------------------------------------------------

def _load(args) -> tuple[LinearSystem, SignedDigraph]:
    path = args.file_opt or args.path
    if not path:
        raise FormatError("no input file given (positional PATH or --system)")
    try:
        model = load_model(path, float_mode=args.float_mode)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    if isinstance(model, LinearSystem):
        return model, system_to_graph(model)
    return graph_to_sign_pattern(model), model


def analyze(sys_: LinearSystem, g: SignedDigraph, depth_bound: int | None = None) -> dict[str, Any]:
    """Full analysis report; raises :class:`InconsistencyError` on an invariant breach."""
    C = controllability_matrix(sys_)
    basis = range_basis(C)
    reach = reachability(g)
    states = herdable_states(C)
    complete = completely_herdable(C)
    unisigned = unisigned_sufficient(C)
    sign = sign_herdable(g, depth_bound)
    positive = is_positive_system(sys_)
    ws = compute_walk_sets(g, depth_bound or sys_.n)

    if not complete.validate(C):
        raise InconsistencyError("LP witness/certificate does not validate")
    if complete.herdable and not reach.input_connectable:
        raise InconsistencyError("completely herdable but not input connectable")
    if (unisigned is not None or sign.completely_sign_herdable) and not complete.herdable:
        raise InconsistencyError("sufficient condition holds but LP says not herdable")

    positive_verdict = None
    if positive:
        pv = positive_system_verdict(sys_, C=C)
        if pv.herdable != complete.herdable:
            raise InconsistencyError("positive-system shortcut disagrees with LP")
        positive_verdict = verdict_to_dict(pv)

    branching = None
    if g.n_inputs == 1:
        b = analyze_branching(g)
        if b.is_out_branching:
            for fam in b.maximal_families:
                if not fam <= states:
                    raise InconsistencyError("branching family contains a non-herdable state")
        branching = branching_to_dict(b)

    return {
        "system": {"n": sys_.n, "m": sys_.m, "positive": positive},
        "controllability_matrix": C.C.to_strings(),
        "rank": basis.rank,
        "reachable": {input_node(j).label: _labels(R) for j, R in enumerate(reach.reachable)},
        "input_connectable": reach.input_connectable,
        "herdable_states": _one_based(states),
        "complete_herdability": verdict_to_dict(complete),
        "unisigned_assignment": None if unisigned is None else
        {state(i).label: j + 1 for i, j in unisigned.items()},
        "sign_herdability": sign_report_to_dict(sign),
        "positive_system_verdict": positive_verdict,
        "branching": branching,
        "walk_sets": walk_sets_to_list(ws),
    }


def cmd_analyze(args, out) -> int:
    sys_, g = _load(args)
    _require_json(args)
    out.write(_dump(analyze(sys_, g, args.max_depth)))
    return EXIT_OK


def cmd_check(args, out) -> int:
    sys_, _ = _load(args)
    _require_json(args)
    X = check_state_set(parse_index_list(args.set), sys_.n, one_based=True)
    C = controllability_matrix(sys_)
    verdict = check_set(C, X)
    if not verdict.validate(C):
        raise InconsistencyError("LP witness/certificate does not validate")
    out.write(_dump(verdict_to_dict(verdict)))
    return EXIT_OK


def cmd_walksets(args, out) -> int:
    _, g = _load(args)
    inputs = None
    if args.input is not None:
        if not 1 <= args.input <= g.n_inputs:
            raise ValueError(f"--input {args.input} outside 1..{g.n_inputs}")
        inputs = [args.input - 1]
    ws = compute_walk_sets(g, args.max_depth or g.n_states)
    rows = walk_sets_to_list(ws, inputs)
    if args.format == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["input", "depth", "P", "N"])
        for r in rows:
            writer.writerow([r["input"], r["depth"], " ".join(r["P"]), " ".join(r["N"])])
    else:
        out.write(_dump(rows))
    return EXIT_OK


def cmd_branching(args, out) -> int:
    _, g = _load(args)
    _require_json(args)
    root = "u1"
    if args.input is not None:
        if not 1 <= args.input <= g.n_inputs:
            raise ValueError(f"--input {args.input} outside 1..{g.n_inputs}")
        root = input_node(args.input - 1).label
        g = restrict_to_input(g, args.input - 1)
    out.write(_dump(branching_to_dict(analyze_branching(g), root)))
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    sys_, _ = _load(args)
    X = check_state_set(parse_index_list(args.set), sys_.n, one_based=True)
    x0 = None
    if args.x0:
        try:
            x0 = [float(v) for v in args.x0.split(",")]
        except ValueError:
            raise ValueError(f"bad --x0 {args.x0!r}") from None
    cfg = SynthesisConfig(threshold=args.threshold, horizon=args.horizon, steps=args.steps,
                          margin=args.margin, x0=x0)
    result = synthesize(sys_, X, cfg)
    for note in result.warnings:
        print(f"warning: {note}", file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            result.write_csv(fh)
        summary = {
            "set": _one_based(X),
            "threshold": result.threshold,
            "gamma": result.gamma,
            "success": result.success,
            "achieved": {state(i).label: v for i, v in result.achieved.items()},
            "csv": args.out,
        }
        sys.stdout.write(_dump(summary))
    else:
        result.write_csv(out)
    return EXIT_OK if result.success else EXIT_UNMET


def _require_json(args) -> None:
    if args.format != "json":
        raise ValueError(f"{args.command} supports only --format json")


# --- parser ---------------------------------------------------------------

def _non_negative(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val >= 0:
        raise argparse.ArgumentTypeError("threshold must be non-negative")
    return val


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return val


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", nargs="?", help="system or graph JSON file")
    common.add_argument("--system", "--graph", dest="file_opt", metavar="PATH",
                        help="alternative to the positional PATH")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", metavar="PATH", help="write the main output here")
    common.add_argument("--float-mode", action="store_true",
                        help="accept non-integral floats (|x| < 1e-9 counts as zero)")

    parser = argparse.ArgumentParser(prog="herd", description="Herdability analysis of linear systems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="full report")
    p.add_argument("--max-depth", type=_positive_int, default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", parents=[common], help="herdability of a state set")
    p.add_argument("--set", required=True, help="1-based state indices, e.g. 1,2,3")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("walksets", parents=[common], help="signed walk sets per input and depth")
    p.add_argument("--input", type=_positive_int, default=None)
    p.add_argument("--max-depth", type=_positive_int, default=None)
    p.set_defaults(func=cmd_walksets)

    p = sub.add_parser("branching", parents=[common], help="out-branching herdable families")
    p.add_argument("--input", type=_positive_int, default=None,
                   help="restrict a multi-input graph to this input")
    p.set_defaults(func=cmd_branching)

    p = sub.add_parser("simulate", parents=[common], help="steer a set above a threshold")
    p.add_argument("--set", required=True)
    p.add_argument("--threshold", type=_non_negative, default=1.0)
    p.add_argument("--horizon", type=float, default=1.0)
    p.add_argument("--steps", type=_positive_int, default=1000)
    p.add_argument("--margin", type=float, default=2.0)
    p.add_argument("--x0", default=None, help="initial state, comma separated")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except FormatError as exc:
        print(f"herd: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PreconditionError as exc:
        print(f"herd: {exc}", file=sys.stderr)
        return EXIT_UNMET
    except InconsistencyError as exc:
        print(f"herd: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ValueError as exc:
        print(f"herd: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buf.getvalue()
    if args.out and args.command != "simulate":
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
