"""Normalisation of dynamic formulas to the static fragment with I1-I18.

The strategy is innermost-first: the operand of a dynamic operator is made
static before the operator is pushed through its main connective. Each step
replaces ``[E,e]psi`` or ``<E,e>psi`` (psi static) with the right side of
the matching axiom, in which every dynamic operator guards a strict
subformula of psi, so the process terminates.
"""

from __future__ import annotations

from ..errors import NonTermination
from ..relational import EventRegistry, lookup_event
from .axioms import match, rhs
from .formula import And, Box, Dia, DynBox, DynDia, Formula, Imp, Or, Prob, is_static, to_text

DEFAULT_BUDGET = 200_000


class _Rewriter:
    def __init__(self, events: EventRegistry | None, budget: int, trace: list | None):
        self.events = events or {}
        self.budget = budget
        self.steps = 0
        self.trace = trace
        self.memo: dict = {}

    def lookup(self, name: str):
        return lookup_event(self.events, name)

    def norm(self, f: Formula) -> Formula:
        if is_static(f):
            return f
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, (And, Or, Imp)):
            r = type(f)(self.norm(f.left), self.norm(f.right))
        elif isinstance(f, (Dia, Box)):
            r = type(f)(f.agent, self.norm(f.sub))
        elif isinstance(f, Prob):
            r = type(f)(f.agent, tuple((c, self.norm(g)) for c, g in f.terms), f.bound)
        elif isinstance(f, (DynDia, DynBox)):
            g = type(f)(f.event, f.eid, self.norm(f.sub))
            r = self.norm(self.step(g))
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.memo[f] = r
        return r

    def step(self, f: Formula) -> Formula:
        self.steps += 1
        if self.steps > self.budget:
            raise NonTermination(f"rewriting exceeded {self.budget} steps", witness=to_text(f))
        ax, inst = match(f)
        out = rhs(ax, inst, self.lookup)
        if self.trace is not None:
            self.trace.append({"axiom": ax, "before": to_text(f), "after": to_text(out)})
        return out


def rewrite_static(f: Formula, events: EventRegistry | None = None,
                   budget: int = DEFAULT_BUDGET) -> Formula:
    """Equivalent formula without dynamic operators."""
    return _Rewriter(events, budget, None).norm(f)


def rewrite_with_trace(f: Formula, events: EventRegistry | None = None,
                       budget: int = DEFAULT_BUDGET) -> tuple[Formula, list]:
    """``rewrite_static`` plus the list of axiom applications in order."""
    trace: list = []
    return _Rewriter(events, budget, trace).norm(f), trace


def rewrite_step(f: Formula, events: EventRegistry | None = None) -> tuple[str, Formula]:
    """Apply the matching axiom once to a dynamic formula with a static operand."""
    if not isinstance(f, (DynDia, DynBox)) or not is_static(f.sub):
        raise ValueError("expected a dynamic operator over a static formula")
    ax, inst = match(f)
    return ax, rhs(ax, inst, lambda name: lookup_event(events or {}, name))


__all__ = ["NonTermination", "rewrite_static", "rewrite_with_trace", "rewrite_step", "DEFAULT_BUDGET"]
