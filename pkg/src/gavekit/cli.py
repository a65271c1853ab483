"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 inconclusive (budget exhausted, no
certificate, failed verification), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .analysis import DESCRIPTIONS, AnalysisOptions, TheoremId, analyze
from .config import parse_tolerances, tolerances_from_env
from .errors import BudgetExceededError, InputError, NumericalError
from .feasibility import verify_farkas
from .generator import PROPERTIES, GeneratorConfig, random_instance
from .model import (
    SolutionRecord,
    Splitting,
    Target,
    format_pattern,
    parse_instance,
    parse_pattern,
    parse_solution,
    parse_splitting,
    serialize_instance,
    sign_transform,
)
from .solvers import (
    DEFAULT_ENUM_BUDGET,
    PatternInfeasible,
    enumerate_patterns,
    fixed_point_x,
    fixed_point_y,
    solve_pattern,
)

EXIT_OK, EXIT_INPUT, EXIT_INCONCLUSIVE, EXIT_NUMERICAL = 0, 2, 3, 4


class Inconclusive(Exception):
    """Carries a finished report whose answer is not definitive (exit 3)."""

    def __init__(self, payload: dict):
        super().__init__("inconclusive")
        self.payload = payload


# --------------------------------------------------------------------------
# rendering

def _canon(obj):
    """Floats at 12 significant digits, tiny values snapped to 0, inf as a string."""
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        v = float(f"{v:.12g}")
        if abs(v) < 1e-12:
            return 0
        return int(v) if v.is_integer() and abs(v) < 1e15 else v
    return obj


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(t) for t in v) + "]"
    if isinstance(v, dict):
        return "  ".join(f"{k}={_fmt(t)}" for k, t in sorted(v.items()))
    return str(v)


def _text_analysis(rep: dict) -> list[str]:
    st = rep["strongest"]
    lines = [f"strongest conclusion: {st['conclusion']}"]
    if st["theorem"]:
        desc = DESCRIPTIONS[TheoremId(st["theorem"])]
        lines.append(f"  via {st['theorem']}: {desc}")
        lines.append("  chain: " + " > ".join(st["chain"]))
    live = [v for v in rep["verdicts"] if v["applies"]]
    lines.append(f"{len(live)} of {len(rep['verdicts'])} checks apply")
    for v in live:
        w = v["witness"]
        parts = [f"{v['theorem']}", v["conclusion"]]
        for key in ("splitting", "p", "pattern", "columns", "norm", "contraction_factor",
                    "gamma", "case", "nonzeros", "rank"):
            if key in w:
                val = format_pattern(w[key]) if key == "pattern" else _fmt(w[key])
                parts.append(f"{key}={val}")
        lines.append("  " + "  ".join(parts))
    flagged = [v["theorem"] for v in rep["verdicts"] if v.get("inconclusive")]
    if flagged:
        lines.append("inconclusive: " + ", ".join(sorted(set(flagged))))
    for s in rep["solutions"]:
        lines.append(f"solution ({s['source']}): x = {_fmt(s['x'])}  residual {_fmt(s['residual_inf'])}")
    for note in rep.get("notes", []):
        lines.append(f"note: {note}")
    return lines


def _text_enumeration(rep: dict) -> list[str]:
    total = rep["total"]
    head = f"total: {total}" + (f" ({rep['count_if_finite']})" if total == "finite" else "")
    lines = [head]
    for e in rep["patterns"]:
        if e["status"] != "infeasible":
            x = f"  x = {_fmt(e['x'])}" if "x" in e else ""
            lines.append(f"  {format_pattern(e['s'])}: {e['status']}{x}")
    return lines


def _text_generic(obj: dict) -> list[str]:
    return [f"{k}: {_fmt(v)}" for k, v in sorted(obj.items())]


def render_report(obj: dict, fmt: str = "json", kind: str | None = None) -> bytes:
    """Serialize a report.

    ``json`` output is canonical (sorted keys, fixed float format) so equal
    inputs give byte-identical files. ``text`` is a short summary that names
    the theorems used.
    """
    data = _canon(obj)
    if fmt == "json":
        return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")
    if kind == "analyze":
        lines = _text_analysis(data)
    elif kind == "enumerate":
        lines = _text_enumeration(data)
    else:
        lines = _text_generic(data)
    return ("\n".join(lines) + "\n").encode("utf-8")


# --------------------------------------------------------------------------
# commands

def _read(path: str, field: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", "E_IO", field) from None


def _instance(args):
    return parse_instance(_read(args.instance, "instance"))


def _splittings(args, inst) -> list[Splitting]:
    return [parse_splitting(_read(p, "splitting"), inst) for p in (args.splitting or [])]


def cmd_analyze(args, tol) -> dict:
    inst = _instance(args)
    p_values = (args.p,) if args.p else (1, 2, "inf")
    known = tuple(parse_solution(_read(p, "solution"), inst.n) for p in (args.solution or []))
    opts = AnalysisOptions(p_values=p_values, splittings=tuple(_splittings(args, inst)),
                           known_solutions=known, submatrix_budget=args.budget, tol=tol)
    rep = analyze(inst, opts)
    out = rep.to_json()
    if rep.inconclusive and rep.strongest["conclusion"] == "no_info":
        raise Inconclusive(out)
    return out


def cmd_solve(args, tol) -> dict:
    inst = _instance(args)
    splits = _splittings(args, inst)
    if len(splits) > 1:
        raise InputError("solve takes at most one splitting", "E_SPLITTING", "splitting")
    split = splits[0] if splits else None
    p = args.p or "inf"
    if args.pattern is not None:
        s = parse_pattern(args.pattern, inst.n)
        if split is not None:
            rec, trace = fixed_point_y(inst, split, s, tol, p)
            out = {"method": f"y-iteration/{split.target.value}", "solution": rec.to_json(),
                   "converged": trace.converged, "iterations": trace.iterations}
            if not (trace.converged and rec.is_solution(inst, tol)):
                raise Inconclusive(out)
            return out
        res = solve_pattern(inst, s, tol)
        if isinstance(res, PatternInfeasible):
            out = {"method": "pattern-lp", "pattern": list(s), "status": "infeasible",
                   "boundary": res.boundary}
            if res.certificate is not None:
                out["certificate"] = [float(v) for v in res.certificate]
            return out
        return {"method": "pattern-lp", "status": "solved", "solution": res.to_json()}
    if split is not None and split.target is not Target.A:
        raise InputError("without --pattern the splitting must be of A", "E_SPLITTING", "target")
    x, trace = fixed_point_x(inst, split, tol=tol, p=p)
    rec = SolutionRecord.build(inst, x, tol=tol)
    out = {"method": "x-iteration", "solution": rec.to_json(), "converged": trace.converged,
           "iterations": trace.iterations}
    rate = trace.rate_estimate()
    if rate is not None:
        out["rate_estimate"] = rate
    if not (trace.converged and rec.is_solution(inst, tol)):
        raise Inconclusive(out)
    return out


def cmd_enumerate(args, tol) -> dict:
    inst = _instance(args)
    rep = enumerate_patterns(inst, args.budget if args.budget else DEFAULT_ENUM_BUDGET, tol)
    out = rep.to_json()
    nn, nn_count = rep.nonnegative()
    out["nonnegative"] = {"total": nn, "count_if_finite": nn_count}
    return out


def cmd_certify(args, tol) -> dict:
    inst = _instance(args)
    s = parse_pattern(args.pattern, inst.n)
    res = solve_pattern(inst, s, tol)
    out = {"pattern": list(s)}
    if not isinstance(res, PatternInfeasible):
        out.update(status="feasible", solution=res.to_json())
        raise Inconclusive(out)
    if res.certificate is None:
        out.update(status="boundary", margin=res.margin)
        raise Inconclusive(out)
    C = sign_transform(inst, s)[:, [i for i, v in enumerate(s) if v != 0]]
    u = res.certificate
    out.update(status="infeasible", certificate=[float(v) for v in u],
               CTu=[float(v) for v in C.T @ u], bTu=float(inst.b @ u),
               verified=verify_farkas(C, inst.b, u, tol))
    return out


def cmd_generate(args, tol) -> dict:
    pattern = parse_pattern(args.pattern, args.n) if args.pattern else None
    cfg = GeneratorConfig(args.m, args.n, args.property, args.p or 2, pattern)
    return {"instance": random_instance(cfg, args.seed, tol)}


def cmd_verify(args, tol) -> dict:
    inst = _instance(args)
    x = parse_solution(_read(args.solution, "solution"), inst.n)
    rec = SolutionRecord.build(inst, x, tol=tol)
    out = rec.to_json()
    out["verified"] = rec.is_solution(inst, tol)
    if not out["verified"]:
        raise Inconclusive(out)
    return out


COMMANDS = {
    "analyze": cmd_analyze,
    "solve": cmd_solve,
    "enumerate": cmd_enumerate,
    "certify": cmd_certify,
    "generate": cmd_generate,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gavekit", description="Analyze and solve A x - B|x| = b.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("-o", "--output", help="write the report here instead of stdout")
    common.add_argument("--tol", help='tolerance overrides, e.g. "feas=1e-8,step=1e-12"')
    sub = ap.add_subparsers(dest="command", required=True)

    def with_instance(name, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("instance", help="instance JSON file")
        return p

    p = with_instance("analyze", "run every sufficient condition")
    p.add_argument("--splitting", action="append", help="splitting JSON file (repeatable)")
    p.add_argument("--solution", action="append", help="known solution to classify (repeatable)")
    p.add_argument("--p", choices=("1", "2", "inf"), help="restrict to one norm")
    p.add_argument("--budget", type=int, default=10_000, help="column subsets for the submatrix search")

    p = with_instance("solve", "fixed-point iteration or pattern LP")
    p.add_argument("--pattern", help="sign pattern such as +,-,0")
    p.add_argument("--splitting", action="append", help="splitting JSON file")
    p.add_argument("--p", choices=("1", "2", "inf"))

    p = with_instance("enumerate", "decide every sign pattern")
    p.add_argument("--budget", type=int, help=f"maximum patterns (default {DEFAULT_ENUM_BUDGET})")

    p = with_instance("certify", "Farkas certificate for an infeasible pattern")
    p.add_argument("--pattern", required=True)

    p = sub.add_parser("generate", parents=[common], help="random instance with a property")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--property", choices=PROPERTIES, default="none")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--p", choices=("1", "2", "inf"))
    p.add_argument("--pattern", help="sign pattern for the sign-cone properties")

    p = with_instance("verify", "residual of a solution file")
    p.add_argument("--solution", required=True)
    return ap


def _emit(data: bytes, path: str | None) -> None:
    if path:
        with open(path, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        tol = tolerances_from_env()
        if args.tol:
            tol = parse_tolerances(args.tol, tol)
    except ValueError as exc:
        print(f"gavekit: [E_TOL] tolerances: {exc}", file=sys.stderr)
        return EXIT_INPUT

    code = EXIT_OK
    try:
        payload = COMMANDS[args.command](args, tol)
    except Inconclusive as exc:
        payload, code = exc.payload, EXIT_INCONCLUSIVE
    except InputError as exc:
        print(f"gavekit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"gavekit: [E_BUDGET] {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except NumericalError as exc:
        print(f"gavekit: [E_NUMERICAL] {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if args.command == "generate" and code == EXIT_OK:
        inst = payload["instance"]
        data = serialize_instance(inst) if args.format == "json" else render_report(
            {"m": inst.m, "n": inst.n, "A": inst.A.tolist(), "B": inst.B.tolist(),
             "b": inst.b.tolist()}, "text")
    else:
        data = render_report(payload, args.format, args.command)
    try:
        _emit(data, args.output)
    except OSError as exc:
        print(f"gavekit: [E_IO] output: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    return code


def main() -> None:
    sys.exit(run())
