"""First-order terms, atoms, clauses and programs.

Atoms share the term representation: a predicate is just the functor of an
:class:`App` sitting at the top of a term.  This mirrors the grammar level,
where rules such as ``Ca > p(X)`` treat predicate symbols like any other
function symbol.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

NUM = "$num"


class Sym(NamedTuple):
    """A function (or predicate) symbol: name plus arity."""

    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Var:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return hash(("var", self.name))

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class App:
    """Application of a functor to argument terms (a constant when no args)."""

    __slots__ = ("functor", "args", "_hash")

    def __init__(self, functor: str, args=()):
        self.functor = functor
        self.args = tuple(args)
        self._hash = None

    @property
    def symbol(self) -> Sym:
        return Sym(self.functor, len(self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, App)
            and self.functor == other.functor
            and self.args == other.args
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.functor, self.args))
        return self._hash

    def __lt__(self, other):
        return format_term(self) < format_term(other)

    def __repr__(self):
        return f"App({format_term(self)})"

    def __str__(self):
        return format_term(self)


Term = Var | App
Atom = App


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.functor
    return f"{t.functor}({', '.join(format_term(a) for a in t.args)})"


def term_vars(t: Term) -> Iterator[str]:
    """Variable names of ``t`` in left-to-right order, with repetitions."""
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            yield s.name
        else:
            stack.extend(reversed(s.args))


def is_ground(t: Term) -> bool:
    return next(term_vars(t), None) is None


def height(t: Term) -> int:
    """Constants and variables have height 1."""
    if isinstance(t, Var) or not t.args:
        return 1
    return 1 + max(height(a) for a in t.args)


def symbols(t: Term) -> Iterator[Sym]:
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            yield s.symbol
            stack.extend(s.args)


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()

    def __str__(self):
        if not self.body:
            return f"{format_term(self.head)}."
        body = ", ".join(format_term(b) for b in self.body)
        return f"{format_term(self.head)} :- {body}."

    def variables(self) -> list[str]:
        seen = dict.fromkeys(term_vars(self.head))
        for b in self.body:
            seen.update(dict.fromkeys(term_vars(b)))
        return list(seen)


@dataclass(frozen=True)
class Program:
    """A logic program with its predicate partition.

    ``constraint_preds`` holds every predicate whose meaning comes from the
    initial grammar rather than from clauses: built-ins, undefined
    predicates and predicates declared with ``:- constraint p/n.``
    """

    clauses: tuple[Clause, ...] = ()
    defined_preds: frozenset[Sym] = frozenset()
    constraint_preds: frozenset[Sym] = frozenset()
    signature: frozenset[Sym] = frozenset()
    declared: frozenset[Sym] = field(default=frozenset(), compare=False)

    def clauses_for(self, pred: Sym) -> list[Clause]:
        return [c for c in self.clauses if c.head.symbol == pred]

    def __str__(self):
        lines = [f":- constraint {p}." for p in sorted(self.declared)]
        lines.extend(str(c) for c in self.clauses)
        return "\n".join(lines) + ("\n" if lines else "")
