"""Directional-type inference for logic programs with term grammars.

Typical use::

    from regal import load, analyze
    program, g0 = load(program_text, grammar_text)
    report = analyze(program, g0)
"""

from .engine import (
    AnalysisReport, AnalysisWarning, Verdict, analyze, check_specification,
    constraint_call_check, iteration_step,
)
from .frontend import ParseError, load, parse_grammar, parse_program
from .grammar import (
    ANY, CA, SU, TermGrammar, canonical, discriminative_approx, empties, enumerate_terms,
    format_grammar, includes, intersect, member, minimize, normalize, rename_apart, union,
)
from .restriction import WideningConfig, codomain_certificate, principal_label, restrict
from .terms import App, Clause, Program, Sym, Var

__version__ = "0.1.0"

__all__ = [
    "ANY", "CA", "SU", "AnalysisReport", "AnalysisWarning", "App", "Clause", "ParseError",
    "Program", "Sym", "TermGrammar", "Var", "Verdict", "WideningConfig", "analyze",
    "canonical", "check_specification", "codomain_certificate", "constraint_call_check",
    "discriminative_approx", "empties", "enumerate_terms", "format_grammar", "includes",
    "intersect", "iteration_step", "load", "member", "minimize", "normalize", "parse_grammar",
    "parse_program", "principal_label", "rename_apart", "restrict", "union",
]
