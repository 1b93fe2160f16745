import random

from regal.corpus import load_example
from regal.engine import analyze
from regal.frontend import load, parse_program
from regal.grammar import SU
from regal.oracle import random_program, run_bounded, soundness_suite, synthetic_program, unify
from regal.terms import App, Var

from conftest import seed_base

a = App("a")


def nil():
    return App("nil")


def cons(h, t):
    return App("cons", [h, t])


def test_unify():
    s = unify(App("f", [Var("X"), a]), App("f", [App("b"), Var("Y")]), {})
    assert s == {"X": App("b"), "Y": a}
    assert unify(Var("X"), App("f", [Var("X")]), {}) is None
    assert unify(a, App("b"), {}) is None


def test_append_run():
    p, g0 = load_example("append")
    goal = App("app", [cons(a, nil()), nil(), cons(a, nil())])
    obs = run_bounded(p, goal, 12, g0)
    assert goal in obs.successes
    assert App("app", [nil(), nil(), nil()]) in obs.calls
    assert not obs.truncated


def test_nonground_goal_is_standardized():
    p, g0 = load_example("append")
    obs = run_bounded(p, App("app", [cons(a, nil()), nil(), Var("Z")]), 12, g0)
    assert App("app", [nil(), nil(), Var("_0")]) in obs.calls
    assert App("app", [cons(a, nil()), nil(), cons(a, nil())]) in obs.successes


def test_depth_bound_truncates():
    p, g0 = load("p(X) :- p(X).", "ca > p(any).")
    obs = run_bounded(p, App("p", [a]), 5, g0)
    assert obs.truncated and not obs.successes


def test_builtins_follow_the_initial_grammar():
    p, g0 = load_example("goodcall")
    obs = run_bounded(p, App("p"), 5, g0)
    assert App("p") in obs.successes
    p, g0 = load_example("badcall")
    obs = run_bounded(p, App("p"), 5, g0)
    assert App("q", [a]) in obs.calls and not obs.successes


def test_soundness_suite_passes_on_append():
    p, g0 = load_example("append")
    res = soundness_suite(p, g0, analyze(p, g0).grammar)
    assert res.ok and res.goals > 0


def test_broken_analysis_is_caught():
    p, g0 = load_example("append")
    g = analyze(p, g0).grammar.copy()
    g._rules[SU] = {}
    res = soundness_suite(p, g0, g)
    assert not res.ok and res.kind == "success"
    assert res.counterexample.functor == "app"


def test_constraint_only_goals_pass_vacuously():
    p, g0 = load("", "ca > q(X). su > q(X). X > a.")
    res = soundness_suite(p, g0, g0)
    assert res.ok and res.goals == 0


def test_random_program_is_reproducible():
    p1, g1 = random_program(random.Random(seed_base()))
    p2, g2 = random_program(random.Random(seed_base()))
    assert p1.clauses == p2.clauses and g1 == g2


def test_synthetic_program_size():
    text, _ = synthetic_program(500)
    assert len(parse_program(text).clauses) == 500
