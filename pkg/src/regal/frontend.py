"""Readers for program files and grammar files.

Program syntax is a small Edinburgh subset::

    % comment
    :- constraint le/2.
    app(nil, Y, Y).
    app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).

Integer literals are abstracted to the constant ``$num`` so that the set of
function symbols stays finite.

Grammar syntax is one rule per ``.``: ``Lhs > f(V1, ..., Vn).``  The names
``ca``, ``su`` and ``any`` are reserved (in any letter case).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

from .grammar import ANY, CA, SU, TermGrammar, GrammarError, with_any
from .terms import NUM, App, Clause, Program, Sym, Var, symbols

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<num>-?\d+(?:\.\d+)?)
  | (?P<dnum>\$num\b)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>[(),./>])
""", re.VERBOSE)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


class ArityError(ParseError):
    pass


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            line_start = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text:
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.next()

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "eof"


# ---------------------------------------------------------------------------
# programs


class _ProgramParser(_Reader):
    def __init__(self, text: str):
        super().__init__(text)
        self.fun_arity: dict[str, int] = {}
        self.pred_arity: dict[str, int] = {}
        self.anon = 0

    def _check(self, table, name, arity, tok, what):
        old = table.setdefault(name, arity)
        if old != arity:
            raise ArityError(f"{what} {name} used with arities {old} and {arity}",
                             tok.line, tok.col)

    def term(self):
        t = self.tok
        if t.kind == "var":
            self.next()
            if t.text == "_":
                self.anon += 1
                return Var(f"_G{self.anon}")
            return Var(t.text)
        if t.kind in ("num", "dnum"):
            self.next()
            self._check(self.fun_arity, NUM, 0, t, "function symbol")
            return App(NUM)
        if t.kind == "name":
            self.next()
            args = self.args()
            self._check(self.fun_arity, t.text, len(args), t, "function symbol")
            return App(t.text, args)
        raise self.error(f"expected a term, found {t.text or 'end of input'!r}")

    def args(self):
        if not self.at("("):
            return []
        self.next()
        out = [self.term()]
        while self.at(","):
            self.next()
            out.append(self.term())
        self.expect(")")
        return out

    def atom(self) -> App:
        t = self.tok
        if t.kind != "name":
            raise self.error(f"expected a predicate, found {t.text or 'end of input'!r}")
        self.next()
        args = self.args()
        self._check(self.pred_arity, t.text, len(args), t, "predicate")
        return App(t.text, args)

    def directive(self) -> Sym:
        self.expect(":-")
        t = self.tok
        if t.text != "constraint":
            raise self.error(f"unknown directive {t.text!r}")
        self.next()
        name = self.next()
        if name.kind != "name":
            raise self.error("expected a predicate name", name)
        self.expect("/")
        ar = self.next()
        if ar.kind != "num" or ar.text.startswith("-"):
            raise self.error("expected an arity", ar)
        self.expect(".")
        self._check(self.pred_arity, name.text, int(ar.text), name, "predicate")
        return Sym(name.text, int(ar.text))

    def program(self) -> Program:
        clauses, declared = [], set()
        while self.tok.kind != "eof":
            if self.at(":-"):
                declared.add(self.directive())
                continue
            head = self.atom()
            body = []
            if self.at(":-"):
                self.next()
                body.append(self.atom())
                while self.at(","):
                    self.next()
                    body.append(self.atom())
            self.expect(".")
            clauses.append(Clause(head, tuple(body)))
        return make_program(clauses, declared)


def make_program(clauses: Iterable[Clause], declared: Iterable[Sym] = (),
                 extra_signature: Iterable[Sym] = ()) -> Program:
    """Build a :class:`Program`, classifying predicates.

    Predicates without clauses, and declared ones, are constraint
    predicates; clauses whose head is a declared predicate are dropped
    because such predicates take their meaning from the initial grammar.
    """
    declared = frozenset(declared)
    clauses = tuple(c for c in clauses if c.head.symbol not in declared)
    defined = frozenset(c.head.symbol for c in clauses)
    called = {b.symbol for c in clauses for b in c.body}
    constraint = frozenset((called - defined) | declared)
    sig = set(extra_signature)
    for c in clauses:
        for a in (c.head, *c.body):
            for t in a.args:
                sig.update(symbols(t))
    return Program(clauses, defined, constraint, frozenset(sig), declared)


def parse_program(text: str) -> Program:
    return _ProgramParser(text).program()


# ---------------------------------------------------------------------------
# grammars

_RESERVED = {"ca": CA, "su": SU, "any": ANY}


class _GrammarParser(_Reader):
    def var(self, lhs: bool = False) -> str:
        t = self.tok
        if t.kind not in ("var", "name"):
            raise self.error(f"expected a grammar variable, found {t.text or 'end of input'!r}")
        self.next()
        reserved = _RESERVED.get(t.text.lower())
        if reserved is not None:
            if lhs and reserved == ANY:
                raise self.error("'any' is predefined and cannot be given rules", t)
            return reserved
        if t.kind != "var":
            raise self.error(f"grammar variables must be capitalized: {t.text!r}", t)
        return t.text

    def rules(self):
        out = []
        while self.tok.kind != "eof":
            lhs_tok = self.tok
            lhs = self.var(lhs=True)
            self.expect(">")
            st = self.tok
            if st.kind == "name":
                fname = st.text
            elif st.kind in ("num", "dnum"):
                fname = NUM
            else:
                raise self.error(f"expected a function symbol, found {st.text!r}")
            self.next()
            kids = []
            if self.at("("):
                self.next()
                kids.append(self.var())
                while self.at(","):
                    self.next()
                    kids.append(self.var())
                self.expect(")")
            self.expect(".")
            out.append((lhs, Sym(fname, len(kids)), kids, lhs_tok, st))
        return out


def parse_grammar(text: str, sig: Iterable[Sym] = ()) -> TermGrammar:
    """Read a grammar; the result always defines ``Ca``, ``Su`` and ``Any``.

    Symbols in rules for variables other than ``Ca``/``Su`` are function
    symbols and extend ``sig``; a clash of arities with ``sig`` is an error.
    ``Any`` is the universal variable over the extended signature.
    """
    p = _GrammarParser(text)
    rules = p.rules()
    arity = {}
    for s in sig:
        arity.setdefault(s.name, s.arity)
    sig = set(sig)
    for lhs, sym, _, _, st in rules:
        if lhs in (CA, SU):
            continue
        old = arity.setdefault(sym.name, sym.arity)
        if old != sym.arity:
            raise ArityError(f"symbol {sym.name} used with arities {old} and {sym.arity}",
                             st.line, st.col)
        sig.add(sym)
    g = TermGrammar(signature=sig)
    for lhs, sym, kids, lt, _ in rules:
        if lhs in g and sym in g.rules(lhs):
            raise ParseError(f"not discriminative: second rule for ({lhs}, {sym})",
                             lt.line, lt.col)
        g.declare(lhs)
        g.define(lhs, sym, kids)
    return with_any(g)


def load(program_text: str, grammar_text: str) -> tuple[Program, TermGrammar]:
    """Parse a program with its initial grammar over their joint signature."""
    prog = parse_program(program_text)
    g0 = parse_grammar(grammar_text, prog.signature)
    prog = make_program(prog.clauses, prog.declared, g0.signature)
    return prog, g0


def format_program(p: Program) -> str:
    return str(p)


__all__ = [
    "ArityError", "GrammarError", "ParseError", "format_program", "load",
    "make_program", "parse_grammar", "parse_program",
]
