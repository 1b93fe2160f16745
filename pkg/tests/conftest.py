"""Shared fixtures and brute-force oracles.

The oracles here are written from the definitions, independently of the
library code: ``sem`` expands rules naively and ``all_terms`` builds the
Herbrand universe level by level.
"""

from __future__ import annotations

import itertools
import os
import random

import pytest
from hypothesis import strategies as st

from regal.grammar import ANY, CA, SU, TermGrammar
from regal.terms import App, Sym

SIG4 = (Sym("a", 0), Sym("b", 0), Sym("f", 1), Sym("g", 2))


def all_terms(signature, depth):
    """Every ground term over ``signature`` with height at most ``depth``."""
    level: set = set()
    for _ in range(depth):
        nxt = set(level)
        for s in signature:
            for args in itertools.product(sorted(level), repeat=s.arity):
                nxt.add(App(s.name, args))
        level = nxt
    return frozenset(level)


def sem(g: TermGrammar, x: str, depth: int) -> frozenset:
    """Terms of height <= depth derivable from ``x``, by naive expansion."""
    if depth <= 0:
        return frozenset()
    if x == ANY:
        return all_terms(g.signature, depth)
    out = set()
    for sym, kids in g._rules[x].items():
        pools = [sem(g, c, depth - 1) for c in kids]
        for args in itertools.product(*pools):
            out.add(App(sym.name, args))
    return frozenset(out)


def seed_base() -> int:
    return int(os.environ.get("REGAL_SEED", "0"))


@pytest.fixture
def rng():
    return random.Random(seed_base())


@st.composite
def grammars(draw, signature=SIG4, max_vars=4, roots=False):
    """Discriminative grammars over ``signature`` with variables X0..Xn."""
    n = draw(st.integers(1, max_vars))
    names = [f"X{i}" for i in range(n)]
    g = TermGrammar(signature=signature)
    for x in names:
        g.declare(x)
    lhs = names + ([CA, SU] if roots else [])
    for x in lhs:
        for s in signature:
            if draw(st.booleans()):
                g.define(x, s, [draw(st.sampled_from(names)) for _ in range(s.arity)])
    return g


def list_grammar(alphabet, name="L", elem="E"):
    g = TermGrammar(signature=[Sym("nil", 0), Sym("cons", 2)] + [Sym(a, 0) for a in alphabet])
    g.define(name, Sym("nil", 0), [])
    g.define(name, Sym("cons", 2), [elem, name])
    for a in alphabet:
        g.define(elem, Sym(a, 0), [])
    return g


__all__ = ["SIG4", "all_terms", "sem", "seed_base", "grammars", "list_grammar", "CA", "SU"]


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
