import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regal.frontend import parse_grammar
from regal.grammar import ANY, CA, SU, TermGrammar, canonical, format_grammar, union, with_any
from regal.oracle import random_grammar
from regal.restriction import (
    VARIANTS, WideningConfig, codomain_certificate, grammar_graph, principal_label, restrict,
)
from regal.terms import App, Sym

from conftest import SIG4, grammars, seed_base, sem

A, F1 = Sym("a", 0), Sym("f", 1)


def f(t):
    return App("f", [t])


a = App("a")


def test_principal_label():
    g = parse_grammar("L > nil. L > cons(E, L). E > a. X > f(E).")
    assert principal_label("L", g) == {Sym("nil", 0), Sym("cons", 2)}
    g.declare("R")
    assert principal_label("R", g) == frozenset()
    u, h = union("L", "X", g)
    assert principal_label(u, h) == principal_label("L", g) | principal_label("X", g)


def test_grammar_graph():
    g = TermGrammar()
    g.define("X", F1, ["Y"])
    g.define("Y", A, [])
    assert grammar_graph(g).edges == {("X", "Y")}
    g = TermGrammar()
    g.define("X", F1, ["X"])
    assert grammar_graph(g).edges == {("X", "X")}
    assert grammar_graph(TermGrammar()).edges == frozenset()


def test_chain_is_folded():
    g = parse_grammar("ca > p(X0). X0 > f(X1). X1 > f(X2). X2 > a.")
    assert not codomain_certificate(g)
    assert not codomain_certificate(parse_grammar("X0 > f(X1). X1 > f(X2). X2 > a."))
    r = restrict(g)
    assert codomain_certificate(r)
    (m,) = r.rules(CA)[Sym("p", 1)]
    assert sem(r, m, 4) == {f(a), f(f(a))}
    assert sem(r, m, 4) >= sem(g, "X0", 4)


def test_certificate_trivial_cases():
    assert codomain_certificate(TermGrammar())
    assert codomain_certificate(restrict(parse_grammar("ca > p(X). X > f(X). X > a.")))


def test_recursive_types_survive():
    g = parse_grammar("ca > app(L, L, any). L > nil. L > cons(A, L). A > a.")
    r = restrict(g)
    assert format_grammar(r) == format_grammar(canonical(g))


def test_config_validation():
    with pytest.raises(ValueError):
        WideningConfig("nope")
    with pytest.raises(ValueError):
        WideningConfig(k=0)


CONFIGS = [WideningConfig(v, k) for v in VARIANTS for k in (1, 2)]


@settings(max_examples=120, deadline=None)
@given(grammars(roots=True), st.sampled_from(CONFIGS))
def test_restrict_contract(g, cfg):
    g = with_any(g)
    r = restrict(g, cfg)
    assert codomain_certificate(r, cfg)
    assert restrict(r, cfg) == r
    for root in (CA, SU):
        for d in range(1, 5):
            assert sem(r, root, d) >= sem(g, root, d)


# the finite co-domain, enumerated ------------------------------------------------

SIG2 = (A, F1)
LABELS = [frozenset(), frozenset([A]), frozenset([F1]), frozenset([A, F1])]
ANY_LABEL = frozenset([A, F1])


def certified_forms():
    """Every canonical grammar over {a, f} whose DFS forest has distinct
    labels on each branch (k = 1), built in DFS order.

    Each variable has at most one child (the argument of f), so a state is
    the grammar so far, the labels on the current branch and the open slot.
    """
    out = set()

    def finish(rules):
        g = TermGrammar(signature=SIG2)
        for x, (lab, kid) in rules.items():
            g.declare(x)
            if A in lab:
                g.define(x, A, [])
            if F1 in lab:
                g.define(x, F1, [kid])
        out.add(format_grammar(canonical(with_any(g))))

    def grow(rules, pending, any_seen):
        # pending: list of (owner, branch labels) slots still to fill, DFS order
        if not pending:
            roots_left = [r for r in (CA, SU) if r not in rules]
            if not roots_left:
                finish(rules)
                return
            r = roots_left[0]
            for lab in LABELS:
                new = dict(rules)
                new[r] = (lab, None)
                slots = [(r, (lab,))] if F1 in lab else []
                grow(new, slots, any_seen)
            return
        (owner, branch), rest = pending[0], pending[1:]
        lab_owner = rules[owner][0]

        def attach(target, new_rules, extra, seen):
            new_rules = dict(new_rules)
            new_rules[owner] = (lab_owner, target)
            grow(new_rules, extra + rest, seen)

        for x in list(rules):
            attach(x, rules, [], any_seen)
        if any_seen:
            attach(ANY, rules, [], any_seen)
        elif ANY_LABEL not in branch:
            attach(ANY, rules, [], True)
        name = f"N{len(rules)}"
        for lab in LABELS[1:]:
            if lab in branch:
                continue
            new = dict(rules)
            new[name] = (lab, None)
            extra = [(name, branch + (lab,))] if F1 in lab else []
            new[owner] = (lab_owner, name)
            grow(new, extra + rest, any_seen)

    grow({}, [], False)
    return out


def test_codomain_is_finite_and_covers_restrict():
    forms = certified_forms()
    # precomputed by this enumerator; any change means the co-domain moved
    assert len(forms) == 264
    for text in forms:
        assert codomain_certificate(parse_grammar(text, SIG2))
    rng = random.Random(seed_base())
    hit = set()
    for _ in range(1000):
        g = with_any(random_grammar(rng, list(SIG2), n_vars=rng.randint(1, 5),
                                    density=rng.choice([0.3, 0.5, 0.8])))
        r = restrict(g)
        text = format_grammar(r)
        assert text in forms
        hit.add(text)
    assert len(hit) <= len(forms)
