"""Grammar algebra on two list types.

Run: python3 demos/01_grammar_algebra.py
"""

from regal import enumerate_terms, format_grammar, includes, intersect, parse_grammar, union

# %% lists of a's and lists of b's
g = parse_grammar("""
L > nil. L > cons(A, L). A > a.
M > nil. M > cons(B, M). B > b.
""")
print(format_grammar(g))

# %% inclusion is decided without enumerating anything
print("L includes M:", includes("L", "M", g))
print("Any includes L:", includes("Any", "L", g))

# %% intersection is exact, so only the empty list survives
v, h = intersect("L", "M", g)
print("L & M =", sorted(map(str, enumerate_terms(v, h, 4))))

# %% union must stay deterministic, so mixed lists creep in
v, h = union("L", "M", g)
terms = sorted(map(str, enumerate_terms(v, h, 3)))
print("L | M (height <= 3):", terms)
print("cons(a, cons(b, nil)) is admitted:", "cons(a, cons(b, nil))" in map(str, enumerate_terms(v, h, 4)))
