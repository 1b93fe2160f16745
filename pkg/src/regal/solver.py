"""Per-clause construction of new call and success rules.

For a clause ``p(t) :- B1, ..., Bn`` and the current grammar ``G``, the
implication with index ``j <= n`` reads "if ``p(t)`` is a call and
``B1..B(j-1)`` are successes then ``Bj`` is a call"; index ``n + 1`` reads
"if ``p(t)`` is a call and all ``Bl`` are successes then ``p(t)`` is a
success".  Each implication yields at most one new rule for ``Ca`` or
``Su``; see :func:`solve_clause`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .grammar import (
    ANY, CA, SU, TermGrammar, _apply_renaming, _intersect_into, normalize, reachable,
    rename_apart,
)
from .terms import App, Clause, Sym, Term, Var, is_ground

Binding = dict[str, str]


class Workspace:
    """A grammar being extended during one iteration step.

    Product variables and emptiness facts are cached here; rules of
    existing variables never change while a workspace is alive, so the
    caches stay valid across clauses.
    """

    def __init__(self, g: TermGrammar, tag: str = "w"):
        self.g = normalize(g).copy()
        self.meet_memo: dict = {}
        self.alive: dict[str, bool] = {}
        self.built: dict[App, str] = {}
        self.tag = tag

    def nonempty(self, x: str) -> bool:
        known = self.alive.get(x)
        if known is not None:
            return known
        rules = self.g._rules
        # collect the unexplored part below x, then run a local fixpoint
        region, stack = [], [x]
        seen = {x}
        while stack:
            v = stack.pop()
            region.append(v)
            for kids in rules[v].values():
                for c in kids:
                    if c not in seen and c not in self.alive:
                        seen.add(c)
                        stack.append(c)
        ok: set[str] = set()
        alive = self.alive

        def good(c):
            return c in ok or alive.get(c, False)

        changed = True
        while changed:
            changed = False
            for v in region:
                if v in ok:
                    continue
                if any(all(good(c) for c in kids) for kids in rules[v].values()):
                    ok.add(v)
                    changed = True
        for v in region:
            self.alive[v] = v in ok
        return self.alive[x]

    def meet(self, x: str, y: str) -> str:
        return _intersect_into(self.g, x, y, self.meet_memo)


def match_term(t: Term, x: str, env: Binding, w: Workspace) -> Binding | None:
    """Constrain ``env`` so that ``t`` ranges over the language of ``x``.

    Returns the extended binding, or None (failure) when some clause
    variable would range over the empty set.  ``env`` itself is untouched.
    """
    env = dict(env)
    stack = [(t, x)]
    rules = w.g._rules
    while stack:
        s, v = stack.pop()
        if isinstance(s, Var):
            old = env.get(s.name)
            new = v if old is None else w.meet(old, v)
            if not w.nonempty(new):
                return None
            env[s.name] = new
            continue
        kids = rules[v].get(s.symbol)
        if kids is None:
            return None
        stack.extend(zip(s.args, kids))
    return env


def build_term(t: Term, env: Binding, w: Workspace) -> str:
    """A variable whose language contains every instance of ``t`` under ``env``.

    Unbound clause variables range over ``Any``.
    """
    if isinstance(t, Var):
        return env.get(t.name, ANY)
    ground = is_ground(t)
    if ground and t in w.built:
        return w.built[t]
    kids = [build_term(a, env, w) for a in t.args]
    v = w.g.fresh(f"B{w.tag}_")
    w.g.define(v, t.symbol, kids)
    w.alive[v] = all(w.nonempty(k) for k in kids)
    if ground:
        w.built[t] = v
    return v


@dataclass(frozen=True)
class NewRule:
    """A rule ``root > symbol(children)`` produced by one implication."""

    root: str
    symbol: Sym
    children: tuple[str, ...]
    source: tuple[int, int]


def clause_rules(clause: Clause, w: Workspace, clause_id: int = 0) -> list[NewRule | None]:
    """Results for every implication index ``j = 1 .. n+1`` of ``clause``.

    Entry ``j - 1`` is None when implication ``j`` is vacuous.  Supporting
    variables are created in ``w``; matching work is shared between
    consecutive indices.
    """
    n = len(clause.body)
    out: list[NewRule | None] = [None] * (n + 1)
    head = clause.head
    ca_rules = w.g._rules[CA]
    if head.symbol not in ca_rules:
        return out
    env = match_term(head, CA, {}, w)
    su_rules = w.g._rules[SU]
    for j, atom in enumerate(clause.body, start=1):
        if env is None:
            return out
        kids = tuple(build_term(a, env, w) for a in atom.args)
        out[j - 1] = NewRule(CA, atom.symbol, kids, (clause_id, j))
        env = match_term(atom, SU, env, w) if atom.symbol in su_rules else None
    if env is not None:
        kids = tuple(build_term(a, env, w) for a in head.args)
        out[n] = NewRule(SU, head.symbol, kids, (clause_id, n + 1))
    return out


@dataclass(frozen=True)
class Contribution:
    """A stand-alone grammar holding one new ``Ca`` or ``Su`` rule.

    Apart from ``Ca`` and ``Su`` its variables are private.
    """

    grammar: TermGrammar
    rule: NewRule
    source: tuple[int, int] = field(default=(0, 0))


def solve_clause(clause: Clause, j: int, g: TermGrammar, clause_id: int = 0) -> Contribution | None:
    """The contribution of implication ``j`` (1-based, ``n+1`` = success), or None."""
    n = len(clause.body)
    if not 1 <= j <= n + 1:
        raise ValueError(f"implication index {j} outside 1..{n + 1}")
    w = Workspace(g, tag=f"c{clause_id}")
    rule = clause_rules(clause, w, clause_id)[j - 1]
    if rule is None:
        return None
    return _detach(rule, w.g, clause_id, j)


def _detach(rule: NewRule, g: TermGrammar, clause_id: int, j: int) -> Contribution:
    part = _apply_renaming(g, {v: v for v in reachable(g, rule.children)})
    part.declare(CA)
    part.declare(SU)
    part = rename_apart(part, keep=(CA, SU), tag=f"c{clause_id}_{j}")
    kids = tuple(c if c in (CA, SU) else f"{c}_c{clause_id}_{j}" for c in rule.children)
    part._rules[rule.root] = {}
    part.define(rule.root, rule.symbol, kids)
    return Contribution(part, NewRule(rule.root, rule.symbol, kids, rule.source), (clause_id, j))
