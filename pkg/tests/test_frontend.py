import pytest
from hypothesis import given, settings

from regal.frontend import ArityError, ParseError, format_program, load, parse_grammar, parse_program
from regal.grammar import ANY, CA, SU, format_grammar, with_any
from regal.terms import NUM, App, Sym, Var, height, is_ground

from conftest import SIG4, grammars


def test_single_fact():
    p = parse_program("p(a).")
    assert len(p.clauses) == 1
    assert p.defined_preds == {Sym("p", 1)}
    assert p.constraint_preds == frozenset()


def test_unknown_body_predicate_is_constraint():
    p = parse_program("p :- q(a).")
    assert p.constraint_preds == {Sym("q", 1)}
    assert p.defined_preds == {Sym("p", 0)}


def test_numbers_become_num():
    p = parse_program("p(3). p(-2.5).")
    assert p.clauses[0].head == App("p", [App(NUM)])
    assert p.clauses[1].head == App("p", [App(NUM)])
    assert Sym(NUM, 0) in p.signature


def test_anonymous_variables_are_distinct():
    (c,) = parse_program("p(_, _).").clauses
    a, b = c.head.args
    assert isinstance(a, Var) and isinstance(b, Var) and a != b


def test_comments_and_layout():
    p = parse_program("% a comment\np(X) :-\n   q(X),  % trailing\n   r(X).\n")
    assert len(p.clauses[0].body) == 2


def test_constraint_directive_drops_clauses():
    p = parse_program(":- constraint q/1.\nq(a).\np(X) :- q(X).")
    assert Sym("q", 1) in p.constraint_preds
    assert [c.head.symbol for c in p.clauses] == [Sym("p", 1)]


def test_syntax_error_position():
    with pytest.raises(ParseError) as e:
        parse_program("p(a).\nq(b :- r.")
    assert e.value.line == 2


def test_function_arity_clash():
    with pytest.raises(ArityError):
        parse_program("p(f(a)). p(f(a, b)).")


def test_predicate_arity_clash():
    with pytest.raises(ArityError):
        parse_program("p(a). p(a, b).")


def test_signature_covers_clause_symbols():
    p = parse_program("app(nil, Y, Y). app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).")
    assert p.signature == {Sym("nil", 0), Sym("cons", 2)}


def test_program_round_trip():
    text = ("app(nil, Y, Y).\n"
            "app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).\n"
            "p(3, _) :- q(X), app(X, X, nil).\n")
    p = parse_program(text)
    again = parse_program(format_program(p))
    assert again.clauses == p.clauses
    assert again.constraint_preds == p.constraint_preds


def test_grammar_list_example():
    g = parse_grammar("ca > p(L). L > nil. L > cons(any, L).")
    assert set(g.variables()) == {CA, SU, "L", ANY}
    assert g.rules(SU) == {}
    assert g.rules(CA) == {Sym("p", 1): ("L",)}
    assert g.rules("L")[Sym("cons", 2)] == (ANY, "L")


def test_grammar_not_discriminative():
    with pytest.raises(ParseError, match="discriminative"):
        parse_grammar("ca > p(X). ca > p(Y).")


def test_grammar_num_success_spec():
    g = parse_grammar("su > q(N). N > $num.")
    assert g.rules(SU) == {Sym("q", 1): ("N",)}
    assert g.rules("N") == {Sym(NUM, 0): ()}


def test_grammar_any_has_a_rule_per_symbol():
    g = parse_grammar("ca > p(X). X > f(X). X > a.", [Sym("g", 2)])
    assert set(g.rules(ANY)) == {Sym("f", 1), Sym("a", 0), Sym("g", 2)}
    assert g.rules(ANY)[Sym("g", 2)] == (ANY, ANY)


def test_grammar_errors():
    with pytest.raises(ParseError):
        parse_grammar("any > a.")
    with pytest.raises(ParseError):
        parse_grammar("x > a.")
    with pytest.raises(ArityError):
        parse_grammar("X > f(Y). Y > f.")


def test_load_joins_signatures():
    p, g = load("p(nil).", "ca > p(L). L > cons(A, L). L > nil. A > a.")
    assert {Sym("nil", 0), Sym("cons", 2), Sym("a", 0)} <= p.signature
    assert g.signature == p.signature


@settings(max_examples=60, deadline=None)
@given(grammars(roots=True))
def test_grammar_round_trip(g):
    g = with_any(g)
    again = parse_grammar(format_grammar(g), g.signature)
    # ruleless variables that nothing mentions have no textual form
    used = {x for x in g.variables() if g.rules(x)} | {c for _, _, k in g.iter_rules() for c in k}
    assert {x: dict(g.rules(x)) for x in used | {CA, SU}} == \
        {x: dict(again.rules(x)) for x in again.variables()}


def test_term_helpers():
    t = App("f", [App("g", [App("a"), Var("X")])])
    assert height(t) == 3
    assert height(App("a")) == 1
    assert not is_ground(t)
    assert str(t) == "f(g(a, X))"
    assert sorted(SIG4)[0] == Sym("a", 0)
