import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from regal.frontend import parse_grammar, parse_program
from regal.grammar import ANY, CA, SU, TermGrammar, member, with_any
from regal.oracle import resolve
from regal.solver import Workspace, build_term, match_term, solve_clause
from regal.terms import App, Clause, Sym, Var, term_vars

from conftest import SIG4, all_terms, sem

a, b = App("a"), App("b")


def ws(text, sig=()):
    return Workspace(parse_grammar(text, sig))


def clause(text):
    (c,) = parse_program(text).clauses
    return c


def test_match_constant():
    w = ws("X > a.")
    assert match_term(a, "X", {"K": "X"}, w) == {"K": "X"}
    assert match_term(b, "X", {}, w) is None


def test_match_list_cell():
    w = ws("L > nil. L > cons(E, L). E > a.")
    env = match_term(App("cons", [Var("H"), Var("T")]), "L", {}, w)
    assert env == {"H": "E", "T": "L"}


def test_match_repeated_variable_intersects():
    w = ws("X > f(A, B). A > a. A > b. B > b. B > c.")
    env = match_term(App("f", [Var("V"), Var("V")]), "X", {}, w)
    assert sem(w.g, env["V"], 1) == {b}
    w = ws("X > f(A, B). A > a. B > c.")
    assert match_term(App("f", [Var("V"), Var("V")]), "X", {}, w) is None


def test_match_does_not_leak_partial_bindings():
    w = ws("X > f(A, B). A > a. B > c.")
    env = {"W": "A"}
    assert match_term(App("f", [Var("V"), Var("V")]), "X", env, w) is None
    assert env == {"W": "A"}


def test_build():
    w = ws("L > nil. L > cons(E, L). E > a.")
    v = build_term(a, {}, w)
    assert w.g.rules(v) == {Sym("a", 0): ()}
    assert build_term(Var("X"), {}, w) == ANY
    v = build_term(App("cons", [Var("H"), Var("T")]), {"H": "E", "T": "L"}, w)
    assert w.g.rules(v) == {Sym("cons", 2): ("E", "L")}


def test_solve_fact():
    g = parse_grammar("ca > p(A). A > a.")
    c = solve_clause(clause("p(a)."), 1, g)
    assert c.rule.root == SU
    assert sem(c.grammar, SU, 2) == {App("p", [a])}


def test_solve_pass_through():
    g = parse_grammar("ca > p(T). T > a.")
    c = solve_clause(clause("p(X) :- q(X)."), 1, g)
    assert c.rule.root == CA and c.rule.symbol == Sym("q", 1)
    assert sem(c.grammar, c.rule.children[0], 3) == {a}


def test_solve_append_call():
    g = parse_grammar("ca > app(L, L, any). L > nil. L > cons(A, L). A > a.")
    app = clause("app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).")
    c = solve_clause(app, 1, g)
    x, y, z = c.rule.children
    for d in range(1, 5):
        assert sem(c.grammar, x, d) == sem(g, "L", d)
        assert sem(c.grammar, y, d) == sem(g, "L", d)
    assert sem(c.grammar, z, 3) == sem(g, ANY, 3)


def test_solve_empty_cases():
    app = clause("app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).")
    # head predicate not called
    g = parse_grammar("ca > q(L). L > nil.")
    assert solve_clause(app, 1, g) is None
    # calls exist but never match cons
    g = parse_grammar("ca > app(L, L, any). L > nil.")
    assert solve_clause(app, 1, g) is None
    # success implication needs a success of the body atom
    g = parse_grammar("ca > app(L, L, any). L > nil. L > cons(A, L). A > a.")
    assert solve_clause(app, 2, g) is None


def test_contributions_share_only_roots():
    g = parse_grammar("ca > app(L, L, any). su > app(L, L, L). L > nil. L > cons(A, L). A > a.")
    app = clause("app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).")
    c1, c2 = solve_clause(app, 1, g), solve_clause(app, 2, g, clause_id=1)
    v1, v2 = set(c1.grammar.variables()), set(c2.grammar.variables())
    assert v1 & v2 <= {CA, SU, ANY}
    assert v1 & set(g.variables()) <= {CA, SU, ANY}


# pointwise soundness of single implications ----------------------------------

P1, Q2 = Sym("p", 1), Sym("q", 2)
VARS = ["X", "Y", "Z"]


def terms(depth):
    if depth <= 1:
        return st.one_of(st.sampled_from([Var(v) for v in VARS]), st.just(a), st.just(b))
    return st.one_of(terms(1), st.builds(lambda t: App("f", [t]), terms(depth - 1)),
                     st.builds(lambda s, t: App("g", [s, t]), terms(depth - 1), terms(depth - 1)))


def atoms():
    return st.one_of(st.builds(lambda t: App("p", [t]), terms(2)),
                     st.builds(lambda s, t: App("q", [s, t]), terms(2), terms(2)))


@st.composite
def interface_grammars(draw):
    names = ["X0", "X1", "X2"]
    g = TermGrammar(signature=SIG4)
    for x in names:
        for s in SIG4:
            if draw(st.booleans()):
                g.define(x, s, [draw(st.sampled_from(names)) for _ in range(s.arity)])
    for root in (CA, SU):
        for s in (P1, Q2):
            if draw(st.integers(0, 3)):
                g.define(root, s, [draw(st.sampled_from(names + [ANY])) for _ in range(s.arity)])
    return with_any(g)


@settings(max_examples=120, deadline=None)
@given(interface_grammars(), atoms(), st.lists(atoms(), max_size=2))
def test_implications_are_sound(g, head, body):
    c = Clause(head, tuple(body))
    names = sorted(set(itertools.chain.from_iterable(term_vars(t) for t in (head, *body))))
    pool = sorted(all_terms(SIG4, 2))
    n = len(body)
    results = {j: solve_clause(c, j, g) for j in range(1, n + 2)}
    for combo in itertools.product(pool, repeat=len(names)):
        s = dict(zip(names, combo))
        h = resolve(head, s)
        if not member(h, CA, g):
            continue
        for j in range(1, n + 2):
            prefix = [resolve(x, s) for x in body[:j - 1]]
            if not all(member(x, SU, g) for x in prefix):
                break
            target, root = (resolve(body[j - 1], s), CA) if j <= n else (h, SU)
            res = results[j]
            assert res is not None, (c, j, s)
            assert member(target, root, res.grammar), (c, j, s)
