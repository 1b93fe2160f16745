"""Checking a hand-written specification without running the fixpoint.

Run: python3 demos/05_checking_a_specification.py
"""

from regal import check_specification, load

PROGRAM = """
app(nil, Y, Y).
app(cons(H, T), Y, cons(H, Z)) :- app(T, Y, Z).
"""
TYPES = "L > nil. L > cons(A, L). A > a. N > nil."

# %% lists in, lists out: one step of the analysis stays inside the spec
good = "ca > app(L, L, any). su > app(L, L, L). " + TYPES
print("lists -> lists:", check_specification(*load(PROGRAM, good)))

# %% claiming the result is always nil is caught with a witness.  The witness
# is drawn from the one-step grammar, whose union of argument types can be
# coarser than the real successes.
bad = "ca > app(L, L, any). su > app(L, L, N). " + TYPES
v = check_specification(*load(PROGRAM, bad))
print("lists -> nil:", v.correct)
for w in v.witnesses:
    print("  witness:", w)
