"""Command-line driver.

    regal infer PROGRAM --spec G0 [--k 1] [--widening principal|count|depth|none]
    regal check PROGRAM --spec SPEC
    regal gram union|intersect|includes|restrict|normalize GRAMMAR [VARS...]

Exit status: 0 clean, 1 warnings or a negative verdict, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import AnalysisReport, Verdict, analyze, check_specification
from .frontend import ParseError, load, parse_grammar, parse_program
from .grammar import (
    ANY, CA, SU, GrammarError, TermGrammar, canonical, format_atom_pattern, format_grammar,
    grammar_records, includes, intersect, normalize, trim, union,
)
from .oracle import soundness_suite
from .restriction import VARIANTS, WideningConfig, restrict


class InputError(Exception):
    pass


def directional_types(report: AnalysisReport) -> list[tuple[str, str, str]]:
    """``(predicate, call pattern, success pattern)`` per predicate."""
    g = report.grammar
    preds = sorted(set(g.rules(CA)) | set(g.rules(SU)))
    out = []
    for p in preds:
        call = format_atom_pattern(g, CA, p) if p in g.rules(CA) else "(no calls)"
        succ = format_atom_pattern(g, SU, p) if p in g.rules(SU) else "(no successes)"
        out.append((str(p), call, succ))
    return out


def _type_grammar(g: TermGrammar) -> str:
    """Rules of the variables below Ca/Su (the types the patterns refer to)."""
    lines = [ln for ln in format_grammar(g).splitlines()
             if not ln.startswith((f"{CA} ", f"{SU} "))]
    return "\n".join(lines)


def render(report: AnalysisReport, fmt: str = "text", trace: bool = False,
           timing: bool = False) -> str:
    cfg = report.config
    widening = "none" if cfg is None else f"{cfg.variant} k={cfg.k}"
    if fmt == "json":
        doc = {
            "iterations": report.iterations,
            "converged": report.converged,
            "widening": None if cfg is None else {"variant": cfg.variant, "k": cfg.k},
            "directional_types": [
                {"predicate": p, "call": c, "success": s}
                for p, c, s in directional_types(report)
            ],
            "warnings": [
                {"kind": w.kind, "message": w.message,
                 "predicate": None if w.predicate is None else str(w.predicate),
                 "witness": None if w.witness is None else str(w.witness)}
                for w in report.warnings
            ],
            "grammar": {
                "signature": sorted(str(s) for s in report.grammar.signature),
                "text": format_grammar(report.grammar),
                "rules": grammar_records(report.grammar),
            },
        }
        if trace:
            doc["trace"] = [str(t) for t in report.trace]
        if timing:
            doc["seconds"] = report.seconds
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    lines = [f"% {report.iterations} iterations, widening {widening}"
             + ("" if report.converged else ", NOT converged")]
    if timing:
        lines.append(f"% {report.seconds:.3f} s")
    lines.append("% directional types")
    for p, c, s in directional_types(report):
        lines.append(f"{p}: {c} -> {s}")
    types = _type_grammar(report.grammar)
    if types:
        lines.append("% types")
        lines.append(types)
    if report.warnings:
        lines.append("% warnings")
        lines.extend(str(w) for w in report.warnings)
    if trace:
        lines.append("% trace")
        lines.extend(str(t) for t in report.trace)
    return "\n".join(lines) + "\n"


def render_verdict(v: Verdict, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps({"correct": v.correct, "reasons": v.reasons,
                           "witnesses": [str(w) for w in v.witnesses]},
                          indent=2, sort_keys=True) + "\n"
    if v.correct:
        return "correct\n"
    lines = ["not verified"]
    lines.extend(f"  {r}" for r in v.reasons)
    lines.extend(f"  witness: {w}" for w in v.witnesses)
    return "\n".join(lines) + "\n"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _load(prog_path: str, spec_path: str):
    """Parse a program and its grammar, naming the file in parse errors."""
    prog_text, spec_text = _read(prog_path), _read(spec_path)
    try:
        parse_program(prog_text)
    except ParseError as e:
        raise InputError(f"{prog_path}:{e}") from None
    try:
        return load(prog_text, spec_text)
    except ParseError as e:
        raise InputError(f"{spec_path}:{e}") from None


def _max_iter(text: str):
    if text.lower() == "none":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer or 'none': {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("--max-iter must be positive")
    return n


def _config(args) -> WideningConfig | None:
    if args.widening == "none":
        return None
    return WideningConfig(args.widening, args.k)


def _add_widening(p):
    p.add_argument("--k", type=int, default=1, help="spanning-tree bound (default 1)")
    p.add_argument("--widening", choices=VARIANTS + ("none",), default="principal")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="infer call and success sets")
    p.add_argument("program")
    p.add_argument("--spec", required=True, help="initial grammar (goals and built-ins)")
    _add_widening(p)
    p.add_argument("--max-iter", type=_max_iter, default=10_000)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--timing", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--verify-sound", action="store_true",
                   help="cross-check the result with the bounded interpreter")
    p.add_argument("--goal-depth", type=int, default=3)
    p.add_argument("--deriv-depth", type=int, default=12)

    p = sub.add_parser("check", help="check a program against a specification grammar")
    p.add_argument("program")
    p.add_argument("--spec", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("gram", help="grammar algebra on a grammar file")
    p.add_argument("op", choices=("union", "intersect", "includes", "restrict", "normalize"))
    p.add_argument("grammar")
    p.add_argument("vars", nargs="*", help="variable operands (two for union/intersect/includes)")
    _add_widening(p)
    return parser


def _cmd_infer(args, out) -> int:
    program, g0 = _load(args.program, args.spec)
    report = analyze(program, g0, _config(args), args.max_iter)
    out.write(render(report, args.format, trace=args.trace, timing=args.timing))
    status = 1 if report.warnings else 0
    if args.verify_sound:
        res = soundness_suite(program, g0, report.grammar, args.goal_depth, args.deriv_depth)
        if res.ok:
            out.write(f"% soundness check passed on {res.goals} goals\n")
        else:
            out.write(f"% soundness check FAILED: {res.kind} {res.counterexample}\n")
            status = 1
    return status


def _cmd_check(args, out) -> int:
    program, spec = _load(args.program, args.spec)
    v = check_specification(program, spec)
    out.write(render_verdict(v, args.format))
    return 0 if v.correct else 1


def _var(name: str) -> str:
    return {"ca": CA, "su": SU, "any": ANY}.get(name.lower(), name)


def _cmd_gram(args, out) -> int:
    try:
        g = parse_grammar(_read(args.grammar))
    except ParseError as e:
        raise InputError(f"{args.grammar}:{e}") from None
    vs = [_var(v) for v in args.vars]
    need = {"union": 2, "intersect": 2, "includes": 2, "restrict": 0, "normalize": 0}[args.op]
    if len(vs) != need:
        raise InputError(f"gram {args.op} takes {need} variable operand(s)")
    for v in vs:
        if v not in g:
            raise InputError(f"unknown grammar variable {v}")
    if args.op == "includes":
        out.write("true\n" if includes(vs[0], vs[1], g) else "false\n")
        return 0
    if args.op in ("union", "intersect"):
        op = union if args.op == "union" else intersect
        v, res = op(vs[0], vs[1], g)
        res = normalize(res)
        res = trim(res, [v])
        out.write(f"% result: {v}\n")
        out.write(format_grammar(res))
        return 0
    if args.op == "restrict":
        cfg = _config(args)
        res = restrict(g, cfg) if cfg is not None else canonical(normalize(g))
    else:
        res = normalize(g)
    out.write(format_grammar(res))
    return 0


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        if args.command == "infer":
            return _cmd_infer(args, out)
        if args.command == "check":
            return _cmd_check(args, out)
        return _cmd_gram(args, out)
    except (InputError, ParseError, GrammarError, ValueError) as e:
        print(f"regal: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
