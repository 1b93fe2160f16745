"""Discriminative term grammars and their algebra.

A grammar maps each variable to at most one rule per function symbol, so
``X > f(X1, ..., Xn)`` is identified by the pair ``(X, f)``.  Such grammars
are deterministic top-down tree automata: membership is a single walk,
intersection is exact, and union can only be over-approximated (by the
path-closure of the two languages).

Grammars are treated as values.  The public operations never mutate their
inputs; the mutating helpers (:meth:`TermGrammar.define`,
:meth:`TermGrammar.fresh`) are meant for code that is still building a
grammar it owns.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from typing import Iterable, Iterator, Mapping

from .terms import App, Sym, Term, Var, format_term, height

CA, SU, ANY = "Ca", "Su", "Any"
ROOTS = (CA, SU)

DEFAULT_ENUM_CAP = 200_000


class GrammarError(ValueError):
    pass


class UnknownVariable(GrammarError, KeyError):
    def __str__(self):
        return f"unknown grammar variable {self.args[0]!r}"


class EnumerationOverflow(RuntimeError):
    """Raised instead of silently truncating an enumeration."""


def _natural_key(name: str):
    order = {CA: 0, SU: 1, ANY: 3}
    if name in order:
        return (order[name], "", 0)
    m = re.fullmatch(r"(.*?)(\d+)", name)
    if m:
        return (2, m.group(1), int(m.group(2)))
    return (2, name, -1)


class TermGrammar:
    """A set of rules ``X > f(X1..Xn)``, discriminative by construction.

    ``signature`` lists the function symbols that make up the universe of
    ground terms; the reserved variable ``Any`` denotes that universe.
    """

    __slots__ = ("_rules", "signature", "_counter", "_normalized")

    def __init__(self, rules: Mapping[str, Mapping[Sym, Iterable[str]]] | None = None,
                 signature: Iterable[Sym] = ()):
        self._rules: dict[str, dict[Sym, tuple[str, ...]]] = {}
        self.signature = frozenset(signature)
        self._counter = 0
        self._normalized = False
        for x in ROOTS:
            self._rules[x] = {}
        for x, rs in (rules or {}).items():
            self.declare(x)
            for sym, kids in rs.items():
                self.define(x, sym, kids)

    # -- reading ---------------------------------------------------------

    def __contains__(self, x: str) -> bool:
        return x in self._rules

    def __len__(self) -> int:
        return len(self._rules)

    def variables(self) -> list[str]:
        return sorted(self._rules, key=_natural_key)

    def rules(self, x: str) -> Mapping[Sym, tuple[str, ...]]:
        try:
            return self._rules[x]
        except KeyError:
            raise UnknownVariable(x) from None

    def iter_rules(self) -> Iterator[tuple[str, Sym, tuple[str, ...]]]:
        for x in self.variables():
            rs = self._rules[x]
            for sym in sorted(rs):
                yield x, sym, rs[sym]

    def rule_count(self) -> int:
        return sum(len(rs) for rs in self._rules.values())

    def __eq__(self, other):
        return (
            isinstance(other, TermGrammar)
            and self._rules == other._rules
            and self.signature == other.signature
        )

    def __repr__(self):
        return f"<TermGrammar {len(self._rules)} vars, {self.rule_count()} rules>"

    def __str__(self):
        return format_grammar(self)

    # -- building --------------------------------------------------------

    def declare(self, x: str) -> None:
        if x not in self._rules:
            self._rules[x] = {}

    def define(self, x: str, sym: Sym, children: Iterable[str]) -> None:
        children = tuple(children)
        if len(children) != sym.arity:
            raise GrammarError(f"rule {x} > {sym} has {len(children)} children")
        rs = self._rules.setdefault(x, {})
        old = rs.get(sym)
        if old is not None and old != children:
            raise GrammarError(f"not discriminative: two rules for ({x}, {sym})")
        rs[sym] = children
        for c in children:
            if c not in self._rules:
                self._rules[c] = {}
        self._normalized = False

    def fresh(self, prefix: str = "V") -> str:
        while True:
            name = f"{prefix}{self._counter}"
            self._counter += 1
            if name not in self._rules:
                self._rules[name] = {}
                return name

    def copy(self) -> TermGrammar:
        g = TermGrammar.__new__(TermGrammar)
        g._rules = {x: dict(rs) for x, rs in self._rules.items()}
        g.signature = self.signature
        g._counter = self._counter
        g._normalized = self._normalized
        return g


def with_any(g: TermGrammar, signature: Iterable[Sym] | None = None) -> TermGrammar:
    """Return ``g`` with ``Any`` defined as the set of all ground terms."""
    sig = frozenset(signature) if signature is not None else g.signature
    out = g.copy()
    out.signature = out.signature | sig
    out._rules[ANY] = {}
    for sym in out.signature:
        out.define(ANY, sym, (ANY,) * sym.arity)
    return out


# ---------------------------------------------------------------------------
# semantics: membership, emptiness, normalization, enumeration


def member(t: Term, x: str, g: TermGrammar) -> bool:
    """Is the ground term ``t`` in the language of ``x``?"""
    g.rules(x)
    stack = [(t, x)]
    while stack:
        s, v = stack.pop()
        if isinstance(s, Var):
            raise ValueError(f"member expects a ground term, got variable {s.name}")
        kids = g._rules[v].get(s.symbol)
        if kids is None:
            return False
        stack.extend(zip(s.args, kids))
    return True


def productive(g: TermGrammar) -> set[str]:
    """Variables with a nonempty language (least fixpoint)."""
    users: dict[str, list[tuple[str, Sym]]] = {}
    missing: dict[tuple[str, Sym], int] = {}
    done: set[str] = set()
    queue: deque[str] = deque()
    for x, rs in g._rules.items():
        for sym, kids in rs.items():
            distinct = set(kids)
            if not distinct:
                if x not in done:
                    done.add(x)
                    queue.append(x)
                continue
            missing[(x, sym)] = len(distinct)
            for c in distinct:
                users.setdefault(c, []).append((x, sym))
    while queue:
        c = queue.popleft()
        for key in users.get(c, ()):
            missing[key] -= 1
            if missing[key] == 0 and key[0] not in done:
                done.add(key[0])
                queue.append(key[0])
    return done


def empties(g: TermGrammar) -> set[str]:
    return set(g._rules) - productive(g)


def normalize(g: TermGrammar) -> TermGrammar:
    """Drop every rule with an empty child; languages are unchanged."""
    if g._normalized:
        return g
    alive = productive(g)
    out = g.copy()
    for x, rs in out._rules.items():
        dead = [sym for sym, kids in rs.items() if any(c not in alive for c in kids)]
        for sym in dead:
            del rs[sym]
    out._normalized = True
    return out


def reachable(g: TermGrammar, roots: Iterable[str]) -> list[str]:
    """Variables reachable from ``roots`` in DFS preorder (sorted children)."""
    seen: dict[str, None] = {}
    for r in roots:
        if r not in g._rules or r in seen:
            continue
        stack = [r]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen[v] = None
            rs = g._rules[v]
            kids = [c for sym in sorted(rs) for c in rs[sym]]
            stack.extend(reversed(kids))
    return list(seen)


def enumerate_terms(x: str, g: TermGrammar, depth: int,
                    cap: int = DEFAULT_ENUM_CAP) -> frozenset[App]:
    """All terms of ``x`` with height at most ``depth``."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    g.rules(x)
    # a variable at distance k from x is only needed up to height depth - k
    need = {x: depth}
    queue = deque([x])
    while queue:
        v = queue.popleft()
        for kids in g._rules[v].values():
            for c in kids:
                if c not in need:
                    need[c] = need[v] - 1
                    queue.append(c)
    vs = list(need)
    level: dict[str, frozenset[App]] = {v: frozenset() for v in vs}
    for d in range(1, depth + 1):
        nxt = dict(level)
        for v in vs:
            if need[v] < d:
                continue
            out = set()
            for sym, kids in g._rules[v].items():
                pools = [level[c] for c in kids]
                if any(not p for p in pools):
                    continue
                n = 1
                for p in pools:
                    n *= len(p)
                if len(out) + n > cap:
                    raise EnumerationOverflow(
                        f"enumeration of {x} to depth {depth} exceeds {cap} terms")
                for args in itertools.product(*pools):
                    out.add(App(sym.name, args))
            nxt[v] = frozenset(out)
        level = nxt
    return level[x]


def shortest_terms(g: TermGrammar) -> dict[str, App]:
    """A minimal-height member for every nonempty variable (deterministic)."""
    best: dict[str, App] = {}
    changed = True
    while changed:
        changed = False
        for x in g.variables():
            if x in best:
                continue
            for sym, kids in sorted(g._rules[x].items()):
                if all(c in best for c in kids):
                    best[x] = App(sym.name, [best[c] for c in kids])
                    changed = True
                    break
    return best


# ---------------------------------------------------------------------------
# inclusion


def included(gx: TermGrammar, x: str, gy: TermGrammar, y: str,
             known: set | None = None) -> bool:
    """Decide ``sem[gx](x) <= sem[gy](y)`` by coinductive simulation.

    ``known`` is an optional set of pairs already proven included between
    the same two grammars; it is extended on success.
    """
    gx.rules(x)
    gy.rules(y)
    gx, gy = normalize(gx), normalize(gy)
    return simulates(gx._rules, gy._rules, [(x, y)], known)


def simulates(rx: Mapping, ry: Mapping, pairs: Iterable[tuple[str, str]],
              known: set | None = None) -> bool:
    """Do all ``pairs`` satisfy the simulation, over raw rule maps of
    normalized grammars?  See :func:`included`."""
    done = known if known is not None else set()
    seen = set()
    stack = list(pairs)
    while stack:
        pair = stack.pop()
        if pair in seen or pair in done:
            continue
        seen.add(pair)
        a, b = pair
        rb = ry[b]
        for sym, kids in rx[a].items():
            other = rb.get(sym)
            if other is None:
                return False
            stack.extend(zip(kids, other))
    if known is not None:
        known |= seen
    return True


def includes(y: str, x: str, g: TermGrammar) -> bool:
    """True iff ``sem(x)`` is a subset of ``sem(y)``."""
    return included(g, x, g, y)


def difference_witness(gx: TermGrammar, x: str, gy: TermGrammar, y: str) -> App | None:
    """A term in ``sem[gx](x) - sem[gy](y)``, or None when there is none."""
    gx, gy = normalize(gx), normalize(gy)
    small = shortest_terms(gx)
    seen = set()

    def search(a, b):
        if (a, b) in seen:
            return None
        seen.add((a, b))
        rb = gy._rules[b]
        for sym, kids in sorted(gx._rules[a].items()):
            if sym not in rb:
                return App(sym.name, [small[c] for c in kids])
        for sym, kids in sorted(gx._rules[a].items()):
            for i, (c, d) in enumerate(zip(kids, rb[sym])):
                w = search(c, d)
                if w is not None:
                    args = [small[k] for k in kids]
                    args[i] = w
                    return App(sym.name, args)
        return None

    if x not in small:
        return None
    return search(x, y)


# ---------------------------------------------------------------------------
# intersection and union


def _intersect_into(w: TermGrammar, x: str, y: str, memo: dict) -> str:
    """Product construction inside ``w``; returns the variable for ``x`` and ``y``."""
    todo = []

    def node(a, b):
        if a == b:
            return a
        # Any is universal for terms over the signature
        if a == ANY:
            return b
        if b == ANY:
            return a
        key = (a, b) if a <= b else (b, a)
        v = memo.get(key)
        if v is None:
            v = w.fresh("I")
            memo[key] = v
            todo.append((v, a, b))
        return v

    root = node(x, y)
    while todo:
        v, a, b = todo.pop()
        ra, rb = w._rules[a], w._rules[b]
        for sym in sorted(ra.keys() & rb.keys()):
            w.define(v, sym, [node(c, d) for c, d in zip(ra[sym], rb[sym])])
    return root


def intersect(x: str, y: str, g: TermGrammar) -> tuple[str, TermGrammar]:
    """Exact intersection: returns ``(v, g')`` with ``sem(v) = sem(x) & sem(y)``."""
    g.rules(x)
    g.rules(y)
    w = g.copy()
    v = _intersect_into(w, x, y, {})
    return v, w


def determinize(nd: Mapping[str, Iterable[tuple[Sym, tuple[str, ...]]]],
                seeds: Iterable[frozenset[str]],
                signature: Iterable[Sym] = (),
                prefix: str = "U") -> tuple[TermGrammar, dict[frozenset[str], str]]:
    """Top-down subset construction over a possibly nondeterministic rule set.

    Every set of variables reached from ``seeds`` becomes one variable whose
    ``f``-rule merges all ``f``-rules of its members position-wise.  A
    singleton ``{x}`` keeps the name ``x``.  The language of each new
    variable contains the union of its members' languages.
    """
    nd = {x: list(rs) for x, rs in nd.items()}
    out = TermGrammar(signature=signature)
    for x in ROOTS:
        out._rules.pop(x, None)
    taken = set(nd)
    names: dict[frozenset[str], str] = {}
    counter = itertools.count()
    queue: deque[frozenset[str]] = deque()

    def name_of(s: frozenset[str]) -> str:
        n = names.get(s)
        if n is None:
            if len(s) == 1:
                (n,) = s
            else:
                n = f"{prefix}{next(counter)}"
                while n in taken:
                    n = f"{prefix}{next(counter)}"
                taken.add(n)
            names[s] = n
            out._rules[n] = {}
            queue.append(s)
        return n

    for s in seeds:
        name_of(frozenset(s))
    while queue:
        s = queue.popleft()
        n = names[s]
        merged: dict[Sym, list[set[str]]] = {}
        for m in sorted(s):
            for sym, kids in nd.get(m, ()):
                slots = merged.setdefault(sym, [set() for _ in kids])
                for slot, c in zip(slots, kids):
                    slot.add(c)
        for sym in sorted(merged):
            out._rules[n][sym] = tuple(name_of(frozenset(slot)) for slot in merged[sym])
    for x in ROOTS:
        out._rules.setdefault(x, {})
    return out, names


def _nd_rules(g: TermGrammar) -> dict[str, list[tuple[Sym, tuple[str, ...]]]]:
    return {x: list(rs.items()) for x, rs in g._rules.items()}


def union(x: str, y: str, g: TermGrammar) -> tuple[str, TermGrammar]:
    """Discriminative union: ``sem(u)`` contains ``sem(x) | sem(y)``.

    Symbols present in only one operand keep that operand's rule; shared
    symbols get position-wise unions of the children, built recursively and
    memoized on variable sets.
    """
    g.rules(x)
    g.rules(y)
    g = normalize(g)
    seeds = [frozenset([v]) for v in g._rules] + [frozenset([x, y])]
    out, names = determinize(_nd_rules(g), seeds, g.signature)
    out._counter = g._counter
    return names[frozenset([x, y])], out


def discriminative_approx(rules: Iterable[tuple[str, Sym, Iterable[str]]],
                          signature: Iterable[Sym] = ()) -> TermGrammar:
    """Merge same-symbol rules of each variable by unioning their children."""
    nd: dict[str, list] = {}
    for lhs, sym, kids in rules:
        kids = tuple(kids)
        nd.setdefault(lhs, []).append((sym, kids))
        for c in kids:
            nd.setdefault(c, [])
    for x in ROOTS:
        nd.setdefault(x, [])
    pruned = _prune_empty(nd)
    out, _ = determinize(pruned, [frozenset([v]) for v in pruned], signature)
    return out


def _prune_empty(nd):
    alive = _productive_nd(nd)
    return {x: [(s, k) for s, k in rs if all(c in alive for c in k)] for x, rs in nd.items()}


def _productive_nd(nd) -> set[str]:
    alive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for x, rs in nd.items():
            if x in alive:
                continue
            if any(all(c in alive for c in kids) for _, kids in rs):
                alive.add(x)
                changed = True
    return alive


# ---------------------------------------------------------------------------
# renaming, canonical form, serialization

_rename_tags = itertools.count(1)


def rename_apart(g: TermGrammar, keep: Iterable[str] = ROOTS,
                 tag: str | int | None = None) -> TermGrammar:
    """Give every variable outside ``keep`` a fresh name."""
    keep = set(keep)
    if tag is None:
        tag = next(_rename_tags)
    m = {x: (x if x in keep else f"{x}_{tag}") for x in g._rules}
    return _apply_renaming(g, m)


def _apply_renaming(g: TermGrammar, m: Mapping[str, str]) -> TermGrammar:
    out = TermGrammar.__new__(TermGrammar)
    out._rules = {}
    for x, rs in g._rules.items():
        if x not in m:
            continue
        out._rules[m[x]] = {sym: tuple(m[c] for c in kids) for sym, kids in rs.items()}
    out.signature = g.signature
    out._counter = 0
    out._normalized = g._normalized
    for x in ROOTS:
        out._rules.setdefault(x, {})
    return out


def canonical(g: TermGrammar, roots: Iterable[str] = ROOTS) -> TermGrammar:
    """Rename reachable variables to V0, V1, ... in DFS order; drop the rest.

    ``Ca``, ``Su`` and ``Any`` keep their names; ``Any`` is kept even when
    unreachable.  Two grammars that are equal up to renaming of their
    reachable parts have equal canonical forms.
    """
    order = reachable(g, list(roots) + ([ANY] if ANY in g._rules else []))
    m = {}
    n = 0
    for v in order:
        if v in (CA, SU, ANY):
            m[v] = v
        else:
            m[v] = f"V{n}"
            n += 1
    return _apply_renaming(g, m)


def minimize(g: TermGrammar) -> TermGrammar:
    """Merge variables with equal languages, then :func:`canonical`.

    Equivalence is computed by partition refinement on the normalized
    grammar, which is exact for deterministic top-down automata.  ``Ca`` and
    ``Su`` stay apart from everything; variables equivalent to ``Any``
    become ``Any``.  Grammars with equal ``Ca``/``Su`` languages have equal
    minimal forms.
    """
    g = normalize(g)
    rules = g._rules
    order = sorted(rules, key=_natural_key)
    items = {v: sorted(rules[v].items()) for v in order}
    ids: dict = {}
    block = {v: ids.setdefault((v if v in ROOTS else "", tuple(s for s, _ in items[v])), len(ids))
             for v in order}
    count = len(ids)
    while True:
        ids = {}
        nxt = {}
        get = block.__getitem__
        for v in order:
            key = (get(v), *[tuple(map(get, kids)) for _, kids in items[v]])
            nxt[v] = ids.setdefault(key, len(ids))
        block = nxt
        if len(ids) == count:
            break
        count = len(ids)
    rep: dict[int, str] = {}
    for v in order:  # natural order puts Ca, Su first and Any last
        b = block[v]
        if v == ANY or b not in rep:
            rep[b] = v
    m = {v: rep[block[v]] for v in order}
    out = TermGrammar.__new__(TermGrammar)
    out._rules = {}
    for v in order:
        if m[v] == v:
            out._rules[v] = {sym: tuple(m[c] for c in kids) for sym, kids in rules[v].items()}
    out.signature = g.signature
    out._counter = 0
    out._normalized = True
    return canonical(out)


def trim(g: TermGrammar, roots: Iterable[str] = ROOTS) -> TermGrammar:
    keep = reachable(g, list(roots) + ([ANY] if ANY in g._rules else []))
    return _apply_renaming(g, {v: v for v in keep})


def _show_var(v: str) -> str:
    return "any" if v == ANY else v


def format_rule(lhs: str, sym: Sym, kids: Iterable[str]) -> str:
    kids = list(kids)
    rhs = sym.name if not kids else f"{sym.name}({', '.join(_show_var(c) for c in kids)})"
    return f"{lhs} > {rhs}."


def format_grammar(g: TermGrammar) -> str:
    """Canonical text: one sorted rule per line; ``Any`` is implied, not listed."""
    lines = [format_rule(x, sym, kids) for x, sym, kids in g.iter_rules() if x != ANY]
    return "\n".join(lines) + ("\n" if lines else "")


def grammar_records(g: TermGrammar) -> list[dict]:
    return [
        {"lhs": x, "symbol": sym.name, "arity": sym.arity, "children": list(kids)}
        for x, sym, kids in g.iter_rules()
    ]


def grammar_from_records(records: Iterable[Mapping], signature: Iterable[Sym] = ()) -> TermGrammar:
    g = TermGrammar(signature=signature)
    for r in records:
        g.declare(r["lhs"])
        g.define(r["lhs"], Sym(r["symbol"], int(r["arity"])), r["children"])
    return g


def format_atom_pattern(g: TermGrammar, root: str, sym: Sym) -> str:
    """``p(X, Y)`` for the rule ``root > p(X, Y)``, children shown by name."""
    kids = g.rules(root)[sym]
    return format_term(App(sym.name, [Var(_show_var(c)) for c in kids]))
