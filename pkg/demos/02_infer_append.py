"""Inferring call and success types of append.

Run: python3 demos/02_infer_append.py
"""

from regal import CA, SU, App, analyze, load, member
from regal.cli import render

PROGRAM = """
app(nil, Y, Y).
app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).
"""
# goals call app with two lists of a's and anything in the third place
GOALS = "ca > app(L, L, any). L > nil. L > cons(A, L). A > a."

program, g0 = load(PROGRAM, GOALS)
report = analyze(program, g0)
print(render(report, trace=True))

# %% a few spot checks against the inferred grammar
nil, a = App("nil"), App("a")
one = App("cons", [a, nil])
print("app(nil, nil, nil) succeeds?", member(App("app", [nil, nil, nil]), SU, report.grammar))
print("app([a], [], [a]) succeeds?", member(App("app", [one, nil, one]), SU, report.grammar))
print("app([], b, b) succeeds?", member(App("app", [nil, App("b"), App("b")]), SU, report.grammar))
print("is app([], [], b) ever called?",
      member(App("app", [nil, nil, App("b")]), CA, report.grammar))
