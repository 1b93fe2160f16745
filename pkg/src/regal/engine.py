"""The fixpoint iteration computing call and success sets.

One step takes the current grammar ``G``, collects the new ``Ca``/``Su``
rules of every clause implication, merges them with ``G`` and restores
discriminativity by unioning the children of same-predicate rules.  The
loop widens every new grammar with :func:`~regal.restriction.restrict`
and stops once a step adds nothing to ``Ca`` and ``Su``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Iterable

from .grammar import (
    ANY, CA, SU, TermGrammar, canonical, determinize, difference_witness, included,
    minimize, normalize, simulates, with_any,
)
from .restriction import DEFAULT, WideningConfig, restrict
from .solver import Workspace, clause_rules
from .terms import App, Program, Sym

log = logging.getLogger(__name__)

DEFAULT_MAX_ITER = 10_000

CONSTRAINT_CALL = "constraint-call-violation"
ITERATION_CAP = "iteration-cap-reached"


@dataclass(frozen=True)
class AnalysisWarning:
    kind: str
    message: str
    predicate: Sym | None = None
    witness: App | None = None

    def __str__(self):
        text = f"{self.kind}: {self.message}"
        if self.witness is not None:
            text += f" (e.g. {self.witness})"
        return text


@dataclass(frozen=True)
class StepSummary:
    index: int
    contributions: int
    variables: int
    rules: int
    warnings: int

    def __str__(self):
        return (f"step {self.index}: contributions={self.contributions} "
                f"vars={self.variables} rules={self.rules} warnings={self.warnings}")


@dataclass
class AnalysisReport:
    program: Program
    grammar: TermGrammar
    iterations: int
    warnings: list[AnalysisWarning]
    trace: list[StepSummary]
    config: WideningConfig | None
    seconds: float = 0.0
    converged: bool = True


def _prepare(g: TermGrammar, program: Program) -> TermGrammar:
    return normalize(with_any(g, program.signature))


def iteration_step(g: TermGrammar, program: Program, _stats: dict | None = None,
                   clauses: Iterable[int] | None = None) -> TermGrammar:
    """One application of the transformer, without widening.

    The result contains ``g`` at the ``Ca``/``Su`` interface and every new
    rule derivable from the clauses under ``g``.  ``clauses`` limits the
    step to the given clause indices; the caller is responsible for the
    others contributing nothing new.
    """
    return canonical(_step(g, program, _stats, clauses))


def _step(g, program, _stats=None, clauses=None) -> TermGrammar:
    # as iteration_step, but with the working names left in place
    if ANY not in g:
        g = with_any(g, program.signature)
    w = Workspace(g)
    extra_ca, extra_su = [], []
    ids = range(len(program.clauses)) if clauses is None else sorted(clauses)
    for cid in ids:
        clause = program.clauses[cid]
        w.tag = f"c{cid}"
        for rule in clause_rules(clause, w, cid):
            if rule is None:
                continue
            (extra_ca if rule.root == CA else extra_su).append((rule.symbol, rule.children))
    nd = {x: list(rs.items()) for x, rs in w.g._rules.items()}
    nd[CA].extend(extra_ca)
    nd[SU].extend(extra_su)
    seeds = [frozenset([CA]), frozenset([SU]), frozenset([ANY])]
    out, _ = determinize(nd, seeds, w.g.signature)
    if _stats is not None:
        _stats["contributions"] = len(extra_ca) + len(extra_su)
    return normalize(out)


def _constraint_rule_grammar(g: TermGrammar, preds) -> TermGrammar:
    f = g.copy()
    # dropping Ca rules cannot empty any variable that is used
    f._rules[CA] = {s: k for s, k in g.rules(CA).items() if s in preds}
    return f


def constraint_call_check(g: TermGrammar, g0: TermGrammar, program: Program) -> list[AnalysisWarning]:
    """Warnings for calls of constraint predicates outside their allowed set.

    An empty list means ``Ca`` restricted to constraint predicates is
    included in ``Ca`` of ``g0``.
    """
    out = []
    ca0 = g0.rules(CA)
    for pred in sorted(program.constraint_preds & set(g.rules(CA))):
        f = _constraint_rule_grammar(g, {pred})
        if pred in ca0 and included(f, CA, g0, CA):
            continue
        witness = difference_witness(f, CA, g0, CA)
        if witness is None and pred in ca0:
            continue
        out.append(AnalysisWarning(
            CONSTRAINT_CALL,
            f"call of constraint predicate {pred} outside its specified call set",
            pred, witness))
    return out


def _changed(new: TermGrammar, old: TermGrammar, root: str) -> set[Sym]:
    """Predicates whose ``root`` atoms in ``new`` are not all in ``old``."""
    new, old = normalize(new), normalize(old)
    out = set()
    known: set = set()
    old_rules = old.rules(root)
    for pred, kids in new.rules(root).items():
        prev = old_rules.get(pred)
        if prev is None or not simulates(new._rules, old._rules, zip(kids, prev), known):
            out.add(pred)
    return out


def analyze(program: Program, g0: TermGrammar, cfg: WideningConfig | None = DEFAULT,
            max_iter: int | None = DEFAULT_MAX_ITER) -> AnalysisReport:
    """Iterate to a fixpoint; ``cfg=None`` disables widening."""
    start = time.perf_counter()
    g0 = _prepare(g0, program)
    warnings: list[AnalysisWarning] = []
    seen: set[tuple] = set()

    def note(ws):
        fresh = 0
        for wng in ws:
            key = (wng.kind, wng.predicate)
            if key not in seen:
                seen.add(key)
                warnings.append(wng)
                fresh += 1
        return fresh

    called = {b.symbol for c in program.clauses for b in c.body}
    missing = sorted(p for p in program.constraint_preds & called if p not in g0.rules(CA))
    note(AnalysisWarning(CONSTRAINT_CALL, f"constraint predicate {p} has no call specification", p)
         for p in missing)

    def widen(g):
        return restrict(minimize(g), cfg) if cfg is not None else minimize(g)

    # A clause only yields something new when the calls of its head or the
    # successes of its body atoms grew; everything it gave before is
    # already part of h (the iterates only grow at the interface).
    readers_ca: dict[Sym, set[int]] = {}
    readers_su: dict[Sym, set[int]] = {}
    for cid, c in enumerate(program.clauses):
        readers_ca.setdefault(c.head.symbol, set()).add(cid)
        for b in c.body:
            readers_su.setdefault(b.symbol, set()).add(cid)

    h = widen(g0)
    dirty: set[int] = set(range(len(program.clauses)))
    trace: list[StepSummary] = []
    i = 0
    while max_iter is None or i < max_iter:
        i += 1
        stats: dict = {}
        g_next = _step(h, program, stats, dirty)
        fresh = note(constraint_call_check(g_next, g0, program))
        h_next = widen(g_next)
        trace.append(StepSummary(i, stats["contributions"], len(h_next), h_next.rule_count(), fresh))
        log.debug("%s", trace[-1])
        grown_ca, grown_su = _changed(h_next, h, CA), _changed(h_next, h, SU)
        if not grown_ca and not grown_su:
            return AnalysisReport(program, h_next, i, warnings, trace, cfg,
                                  time.perf_counter() - start)
        dirty = set()
        for p in grown_ca:
            dirty |= readers_ca.get(p, set())
        for p in grown_su:
            dirty |= readers_su.get(p, set())
        h = h_next
    warnings.append(AnalysisWarning(ITERATION_CAP, f"no fixpoint after {i} iterations"))
    return AnalysisReport(program, h, i, warnings, trace, cfg,
                          time.perf_counter() - start, converged=False)


@dataclass
class Verdict:
    correct: bool
    reasons: list[str] = field(default_factory=list)
    witnesses: list[App] = field(default_factory=list)

    def __bool__(self):
        return self.correct


def check_specification(program: Program, spec: TermGrammar,
                        g0: TermGrammar | None = None) -> Verdict:
    """One-step sufficient check that ``program`` is correct w.r.t. ``spec``.

    ``spec`` must contain every call and success it generates in one step;
    constraint calls are checked against ``g0`` (``spec`` by default).  A
    negative verdict does not imply that the program is incorrect.
    """
    spec = _prepare(spec, program)
    g0 = spec if g0 is None else _prepare(g0, program)
    step = iteration_step(spec, program)
    verdict = Verdict(True)
    for root, what in ((CA, "calls"), (SU, "successes")):
        if not included(step, root, spec, root):
            verdict.correct = False
            w = difference_witness(step, root, spec, root)
            verdict.reasons.append(f"{what} not closed under the clauses")
            if w is not None:
                verdict.witnesses.append(w)
    for wng in constraint_call_check(step, g0, program):
        verdict.correct = False
        verdict.reasons.append(str(wng))
        if wng.witness is not None and wng.witness not in verdict.witnesses:
            verdict.witnesses.append(wng.witness)
    return verdict

