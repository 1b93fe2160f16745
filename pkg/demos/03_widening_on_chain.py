"""Why widening is needed: a program whose call set grows forever.

Run: python3 demos/03_widening_on_chain.py
"""

from regal import analyze, load
from regal.cli import render
from regal.restriction import WideningConfig

program, g0 = load("p(X) :- p(f(X)).", "ca > p(A). A > a.")

# %% without widening every step adds one more f(...) layer
raw = analyze(program, g0, cfg=None, max_iter=8)
for step in raw.trace:
    print(step)
print("converged:", raw.converged)

# %% with widening the chain is folded into a loop; over the signature {a, f}
# that loop covers every term, hence p(any)
for cfg in (WideningConfig("principal", 1), WideningConfig("count", 2), WideningConfig("depth", 3)):
    r = analyze(program, g0, cfg)
    print(f"--- {cfg.variant} k={cfg.k}")
    print(render(r), end="")
