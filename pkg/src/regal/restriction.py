"""The restriction operator: a widening over discriminative grammars.

The output of :func:`restrict` over-approximates ``Ca`` and ``Su`` of its
input and has a DFS spanning forest (rooted at ``Ca`` then ``Su``,
children in symbol/position order) in which no branch holds more than
``k`` variables with the same principal label.  Over a finite signature
there are finitely many such grammars up to renaming, which is what makes
the fixpoint iteration terminate.

The output is built top-down.  Each output variable stands for a set of
input variables (the union of their languages).  When a new variable would
break the bound, its set is folded into an ancestor instead, and the
ancestor's subtree is rebuilt.  Folds only ever grow sets, so the process
terminates.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .grammar import ANY, CA, ROOTS, SU, TermGrammar, canonical, normalize
from .terms import Sym

VARIANTS = ("principal", "count", "depth")


@dataclass(frozen=True)
class WideningConfig:
    """``principal``: at most ``k`` equal principal labels per branch.
    ``count``: at most ``k`` variables per branch whose label has a given symbol.
    ``depth``: branches hold at most ``k`` variables.
    """

    variant: str = "principal"
    k: int = 1

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown widening variant {self.variant!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")


DEFAULT = WideningConfig()


def principal_label(x: str, g: TermGrammar) -> frozenset[Sym]:
    return frozenset(g.rules(x))


@dataclass(frozen=True)
class GrammarGraph:
    vertices: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def successors(self, x: str) -> list[str]:
        return sorted(y for a, y in self.edges if a == x)


def grammar_graph(g: TermGrammar) -> GrammarGraph:
    edges = {(x, c) for x, _, kids in g.iter_rules() for c in kids}
    return GrammarGraph(frozenset(g.variables()), frozenset(edges))


def _violation(cfg: WideningConfig, label, path_labels: list) -> int | None:
    """Index in ``path_labels`` of the ancestor to fold into, or None."""
    if cfg.variant == "principal":
        same = [i for i, lab in enumerate(path_labels) if lab == label]
        if len(same) + 1 > cfg.k:
            return same[-1]
        return None
    if cfg.variant == "depth":
        if len(path_labels) + 1 > cfg.k:
            return len(path_labels) - 1
        return None
    bad = set()
    for f in label:
        if 1 + sum(1 for lab in path_labels if f in lab) > cfg.k:
            bad.add(f)
    if not bad:
        return None
    for i in range(len(path_labels) - 1, -1, -1):
        if bad & path_labels[i]:
            return i
    return None


class _Node:
    __slots__ = ("index", "required", "members", "label", "path", "children")

    def __init__(self, index, required, members, label, path):
        self.index = index
        self.required = required
        self.members = members
        self.label = label
        self.path = path
        self.children: dict[Sym, list[_Node]] = {}


class _Fold(Exception):
    def __init__(self, target: _Node, members: frozenset[str]):
        self.target = target
        self.members = members


class _Builder:
    def __init__(self, g: TermGrammar, cfg: WideningConfig):
        self.rules = g._rules
        self.cfg = cfg
        self.extras: dict[tuple, frozenset[str]] = {}
        self.nodes: list[_Node] = []
        self.memo: dict[frozenset[str], _Node] = {}
        self.folds = 0

    def label_of(self, members):
        lab = set()
        for m in members:
            lab.update(self.rules[m])
        return frozenset(lab)

    def slot(self, required, path, ancestors) -> _Node:
        """Visit one child position, rebuilding it when a fold targets it."""
        while True:
            mark = len(self.nodes)
            try:
                return self.visit(required, path, ancestors)
            except _Fold as e:
                if e.target.index != mark:
                    raise
                self.folds += 1
                for n in self.nodes[mark:]:
                    del self.memo[n.required]
                del self.nodes[mark:]
                self.extras[path] = self.extras.get(path, frozenset()) | e.members

    def visit(self, required, path, ancestors) -> _Node:
        for a in reversed(ancestors):
            if a.required == required or a.members == required:
                return a
        n = self.memo.get(required)
        if n is not None:
            return n
        members = required | self.extras.get(path, frozenset())
        label = self.label_of(members)
        hit = _violation(self.cfg, label, [a.label for a in ancestors])
        if hit is not None:
            target = ancestors[hit]
            if members <= target.members:
                return target
            raise _Fold(target, members)
        n = _Node(len(self.nodes), required, members, label, path)
        self.nodes.append(n)
        self.memo[required] = n
        below = ancestors + (n,)
        for sym in sorted(label):
            kids = []
            for i in range(sym.arity):
                req = frozenset(
                    self.rules[m][sym][i] for m in members if sym in self.rules[m])
                kids.append(self.slot(req, path + ((sym, i),), below))
            n.children[sym] = kids
        return n

    def run(self, roots):
        for r in roots:
            if r in self.rules:
                self.slot(frozenset([r]), (r,), ())


def restrict(g: TermGrammar, cfg: WideningConfig = DEFAULT) -> TermGrammar:
    """Widen ``g`` into the finite family of grammars satisfying the bound."""
    g = normalize(g)
    b = _Builder(g, cfg)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20_000))
    try:
        b.run(ROOTS)
    finally:
        sys.setrecursionlimit(limit)
    names = {}
    for n in b.nodes:
        if n.required == frozenset([CA]):
            names[n.index] = CA
        elif n.required == frozenset([SU]):
            names[n.index] = SU
        elif n.required == frozenset([ANY]):
            names[n.index] = ANY
        else:
            names[n.index] = f"W{n.index}"
    out = TermGrammar(signature=g.signature)
    for n in b.nodes:
        out.declare(names[n.index])
        for sym, kids in n.children.items():
            out._rules[names[n.index]][sym] = tuple(names[k.index] for k in kids)
    if ANY in g and ANY not in out:
        for sym, kids in g.rules(ANY).items():
            out.define(ANY, sym, kids)
    out = canonical(out)
    out._normalized = True
    return out


def codomain_certificate(g: TermGrammar, cfg: WideningConfig = DEFAULT) -> bool:
    """Does ``g`` satisfy the spanning-forest bound for ``cfg``?

    The forest is the DFS forest of the whole grammar graph, started at
    ``Ca``, then ``Su``, then at every variable not yet visited.
    """
    rules = g._rules
    visited = set()
    # Ca and Su first, then trees for whatever they do not reach
    for root in list(ROOTS) + g.variables():
        if root not in rules or root in visited:
            continue
        # iterative DFS; each frame carries the labels of its tree ancestors
        stack = [(root, ())]
        while stack:
            v, path = stack.pop()
            if v in visited:
                continue
            visited.add(v)
            label = frozenset(rules[v])
            if _violation(cfg, label, list(path)) is not None:
                return False
            below = path + (label,)
            kids = [c for sym in sorted(rules[v]) for c in rules[v][sym]]
            for c in reversed(kids):
                if c not in visited:
                    stack.append((c, below))
    return True

