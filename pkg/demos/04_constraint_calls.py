"""Built-in (constraint) predicates and call checking.

Run: python3 demos/04_constraint_calls.py
"""

from regal import analyze, load

# q/1 has no clauses; the grammar says it may only be called with b
SPEC = "ca > p. ca > q(B). su > q(B). B > b."

for text in ("p :- q(a).", "p :- q(b)."):
    report = analyze(*load(text, SPEC))
    print(text, "->", [str(w) for w in report.warnings] or "no warnings")
