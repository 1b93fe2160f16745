"""Ground truth for tests: a depth-bounded LD-resolution interpreter.

The interpreter observes concrete calls and successes of a program and
shares nothing with the analysis except the initial grammar, which it uses
to decide built-in (constraint) predicates.  :func:`soundness_suite` then
checks that every observation is covered by an analysis result.

The module also holds seeded generators of random grammars and programs.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .frontend import make_program
from .grammar import ANY, CA, SU, TermGrammar, enumerate_terms, member, with_any
from .terms import App, Clause, Program, Sym, Term, Var, is_ground, term_vars

MAX_STEPS = 200_000


@dataclass
class DerivationObservation:
    calls: set[App] = field(default_factory=set)
    successes: set[App] = field(default_factory=set)
    truncated: bool = False


def _walk(t: Term, s: dict) -> Term:
    while isinstance(t, Var) and t.name in s:
        t = s[t.name]
    return t


def resolve(t: Term, s: dict) -> Term:
    t = _walk(t, s)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.functor, [resolve(a, s) for a in t.args])


def _occurs(name: str, t: Term, s: dict) -> bool:
    t = _walk(t, s)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, s) for a in t.args)


def unify(a: Term, b: Term, s: dict) -> dict | None:
    """Most general unifier extending ``s`` (with occurs check), or None."""
    s = dict(s)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if isinstance(x, Var):
            if isinstance(y, Var) and y.name == x.name:
                continue
            if _occurs(x.name, y, s):
                return None
            s[x.name] = y
        elif isinstance(y, Var):
            if _occurs(y.name, x, s):
                return None
            s[y.name] = x
        elif x.functor != y.functor or len(x.args) != len(y.args):
            return None
        else:
            stack.extend(zip(x.args, y.args))
    return s


def _rename(t: Term, suffix: str) -> Term:
    if isinstance(t, Var):
        return Var(t.name + suffix)
    if not t.args:
        return t
    return App(t.functor, [_rename(a, suffix) for a in t.args])


def _standardize(t: App) -> App:
    """Rename variables to _0, _1, ... by first occurrence."""
    m: dict[str, Var] = {}
    for v in term_vars(t):
        if v not in m:
            m[v] = Var(f"_{len(m)}")
    return resolve(t, m) if m else t


class _Interpreter:
    def __init__(self, program: Program, builtin: TermGrammar, builtin_depth: int,
                 depth: int, max_steps: int):
        self.program = program
        self.by_pred: dict[Sym, list[Clause]] = {}
        for c in program.clauses:
            self.by_pred.setdefault(c.head.symbol, []).append(c)
        self.builtin = builtin
        self.builtin_depth = builtin_depth
        self.facts: dict[Sym, list[App]] = {}
        self.depth = depth
        self.steps = 0
        self.max_steps = max_steps
        self.fresh = itertools.count()
        self.obs = DerivationObservation()

    def builtin_answers(self, pred: Sym) -> list[App]:
        facts = self.facts.get(pred)
        if facts is None:
            facts = []
            if pred in self.builtin.rules(SU):
                kids = self.builtin.rules(SU)[pred]
                pools = [sorted(enumerate_terms(k, self.builtin, self.builtin_depth)) for k in kids]
                facts = [App(pred.name, args) for args in itertools.product(*pools)]
            self.facts[pred] = facts
        return facts

    def solve(self, goals, s, depth):
        # goals: linked list of (kind, atom, rest); kind "call" or "exit"
        if goals is None:
            yield s
            return
        self.steps += 1
        if self.steps > self.max_steps:
            self.obs.truncated = True
            return
        kind, atom, rest = goals
        if kind == "exit":
            self.obs.successes.add(_standardize(resolve(atom, s)))
            yield from self.solve(rest, s, depth)
            return
        call = resolve(atom, s)
        self.obs.calls.add(_standardize(call))
        pred = call.symbol
        after = ("exit", atom, rest)
        if pred in self.program.constraint_preds or pred not in self.by_pred:
            if is_ground(call):
                if pred in self.builtin.rules(SU) and member(call, SU, self.builtin):
                    yield from self.solve(after, s, depth)
                return
            for fact in self.builtin_answers(pred):
                s2 = unify(call, fact, s)
                if s2 is not None:
                    yield from self.solve(after, s2, depth)
            return
        if depth == 0:
            self.obs.truncated = True
            return
        for clause in self.by_pred[pred]:
            suffix = f"#{next(self.fresh)}"
            s2 = unify(_rename(clause.head, suffix), call, s)
            if s2 is None:
                continue
            body = after
            for b in reversed(clause.body):
                body = ("call", _rename(b, suffix), body)
            yield from self.solve(body, s2, depth - 1)


def run_bounded(program: Program, goal: App, depth: int, builtin_success: TermGrammar,
                builtin_depth: int = 3, max_steps: int = MAX_STEPS) -> DerivationObservation:
    """Explore every LD-derivation of ``goal`` with at most ``depth`` clause steps.

    Constraint predicates succeed on exactly the atoms of ``Su`` in
    ``builtin_success``; non-ground constraint calls are answered with the
    ground ``Su`` atoms up to height ``builtin_depth``.
    """
    interp = _Interpreter(program, builtin_success, builtin_depth, depth, max_steps)
    for _ in interp.solve(("call", goal, None), {}, depth):
        pass
    return interp.obs


def _ground_instances(t: App, pool: list[App], limit: int = 64):
    names = list(dict.fromkeys(term_vars(t)))
    if not names:
        yield t
        return
    combos = itertools.product(pool, repeat=len(names))
    for combo in itertools.islice(combos, limit):
        yield resolve(t, dict(zip(names, combo)))


def covers(g: TermGrammar, root: str, atom: App, pool: list[App]) -> bool:
    """Is ``atom`` (read as the set of its ground instances) inside ``root``?"""
    return all(member(inst, root, g) for inst in _ground_instances(atom, pool))


@dataclass
class SoundnessResult:
    ok: bool
    counterexample: App | None = None
    kind: str = ""
    goals: int = 0
    truncated: int = 0

    def __bool__(self):
        return self.ok


def soundness_suite(program: Program, g0: TermGrammar, final: TermGrammar,
                    goal_depth: int = 3, deriv_depth: int = 12,
                    goal_cap: int = 2_000) -> SoundnessResult:
    """Check every observed call/success from goals of ``g0`` against ``final``."""
    g0 = with_any(g0, program.signature)
    goals = sorted(enumerate_terms(CA, g0, goal_depth, cap=goal_cap))
    goals = [a for a in goals if a.symbol in program.defined_preds]
    pool = sorted(enumerate_terms(ANY, g0, 2, cap=goal_cap))[:12]
    result = SoundnessResult(True, goals=len(goals))
    for goal in goals:
        obs = run_bounded(program, goal, deriv_depth, g0)
        result.truncated += obs.truncated
        for atom in sorted(obs.calls):
            if not covers(final, CA, atom, pool):
                return SoundnessResult(False, atom, "call", len(goals), result.truncated)
        for atom in sorted(obs.successes):
            if not covers(final, SU, atom, pool):
                return SoundnessResult(False, atom, "success", len(goals), result.truncated)
    return result


# ---------------------------------------------------------------------------
# random inputs


def random_grammar(rng: random.Random, signature: list[Sym], n_vars: int = 4,
                   density: float = 0.5, roots: bool = True) -> TermGrammar:
    """A random discriminative grammar over ``signature``.

    Variables are ``X0 .. X(n-1)``; with ``roots`` set, ``Ca`` and ``Su``
    get random rules too.
    """
    names = [f"X{i}" for i in range(n_vars)]
    lhs = names + ([CA, SU] if roots else [])
    g = TermGrammar(signature=signature)
    for x in names:
        g.declare(x)
    for x in lhs:
        for sym in signature:
            if rng.random() < density:
                g.define(x, sym, [rng.choice(names) for _ in range(sym.arity)])
    return g


FUNCTORS = [Sym("a", 0), Sym("b", 0), Sym("f", 1), Sym("g", 2)]


def _random_term(rng, vars_, depth, functors):
    if depth <= 1 or rng.random() < 0.45:
        if vars_ and rng.random() < 0.6:
            return Var(rng.choice(vars_))
        consts = [s for s in functors if s.arity == 0]
        return App(rng.choice(consts).name)
    sym = rng.choice(functors)
    return App(sym.name, [_random_term(rng, vars_, depth - 1, functors) for _ in range(sym.arity)])


def random_program(rng: random.Random, n_clauses: int | None = None,
                   functors: list[Sym] = FUNCTORS) -> tuple[Program, TermGrammar]:
    """A random program with ``p0..p3`` defined and ``c0, c1`` built in."""
    preds = [Sym(f"p{i}", rng.randint(0, 2)) for i in range(4)]
    builtins = [Sym("c0", 1), Sym("c1", 2)]
    n = n_clauses if n_clauses is not None else rng.randint(1, 30)
    vars_ = ["X", "Y", "Z"]
    clauses = []
    for i in range(n):
        head_pred = preds[i % len(preds)] if i < len(preds) else rng.choice(preds)
        head = App(head_pred.name, [_random_term(rng, vars_, 3, functors)
                                    for _ in range(head_pred.arity)])
        body = []
        for _ in range(rng.randint(0, 3)):
            bp = rng.choice(preds + builtins)
            body.append(App(bp.name, [_random_term(rng, vars_, 3, functors)
                                      for _ in range(bp.arity)]))
        clauses.append(Clause(head, tuple(body)))
    program = make_program(clauses, extra_signature=functors)
    g0 = TermGrammar(signature=functors)
    arg = random_grammar(rng, functors, n_vars=3, density=0.6, roots=False)
    for x, sym, kids in arg.iter_rules():
        g0.declare(x)
        g0.define(x, sym, kids)
    g0 = with_any(g0)
    entry = preds[0]
    g0.define(CA, entry, [rng.choice(["X0", "X1", ANY]) for _ in range(entry.arity)])
    g0.define(CA, Sym("c0", 1), [ANY])
    g0.define(CA, Sym("c1", 2), [ANY, ANY])
    g0.define(SU, Sym("c0", 1), ["X0"])
    g0.define(SU, Sym("c1", 2), ["X1", "X2"])
    return program, g0


def synthetic_program(n_clauses: int = 500) -> tuple[str, str]:
    """Program and grammar text of a chain of list-processing blocks.

    Each block of five clauses defines its own concatenation and reverse
    and hands its result to the next block.
    """
    blocks = max(1, n_clauses // 5)
    lines = []
    for i in range(blocks):
        nxt = f"top{i + 1}(W, Y)" if i + 1 < blocks else "id(W, Y)"
        lines += [
            f"app{i}(nil, Y, Y).",
            f"app{i}(cons(H, T), Y, cons(H, Z)) :- app{i}(T, Y, Z).",
            f"rev{i}(nil, nil).",
            f"rev{i}(cons(H, T), R) :- rev{i}(T, RT), app{i}(RT, cons(H, nil), R).",
            f"top{i}(X, Y) :- rev{i}(X, Z), app{i}(Z, cons(e{i % 7}, X), W), {nxt}.",
        ]
    grammar = "\n".join([
        "ca > top0(L, any).", "L > nil.", "L > cons(E, L).", "E > a.",
        "ca > id(any, any).", "su > id(X, X).", "X > f(X).", "X > a.",
    ])
    return "\n".join(lines) + "\n", grammar + "\n"
