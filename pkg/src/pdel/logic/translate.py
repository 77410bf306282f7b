"""Translation of post-update formulas into event-indexed static formulas.

``translate(psi, e, E)`` is a formula over the original model whose extension
is the event-``e`` block of the extension of ``psi`` after updating with
``E`` (up to the precondition of ``e``). ``lift`` assembles those blocks
into an element of the updated algebra, so that

    eval_algebraic(update_model(M, E), psi) == lift(M, E, psi)
"""

from __future__ import annotations

from fractions import Fraction

from ..relational import EventRegistry, EventStructureL, lookup_event
from .axioms import measure_terms
from .formula import (And, Atom, Bot, Box, Dia, DynBox, DynDia, Formula, Imp, Or, Prob, ProbGt, Top,
                      big_and, big_or, prob)


def translate(psi: Formula, e: int | str, E: EventStructureL, events: EventRegistry | None = None) -> Formula:
    """Static-or-dynamic-free formula standing for ``psi`` at event ``e`` of ``E``.

    Nested dynamic operators are translated inside out, so the result has no
    dynamic operators as long as the substitutions have none.
    """
    registry = dict(events or {})
    registry.setdefault(E.name, E)
    if isinstance(e, str):
        e = E.event_index(e)
    return _Translator(registry).run(psi, e, E)


class _Translator:
    def __init__(self, registry):
        self.registry = registry
        self.memo: dict = {}

    def run(self, f: Formula, e: int, E: EventStructureL) -> Formula:
        key = (f, e, E.name)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._run(f, e, E)
            self.memo[key] = hit
        return hit

    def _run(self, f: Formula, e: int, E: EventStructureL) -> Formula:
        if isinstance(f, Atom):
            return E.sub[e].get(f.name, f)
        if isinstance(f, (Top, Bot)):
            return f
        if isinstance(f, (And, Or, Imp)):
            return type(f)(self.run(f.left, e, E), self.run(f.right, e, E))
        if isinstance(f, Dia):
            return big_or(Dia(f.agent, And(self.run(f.sub, x, E), E.pre_formula(x)))
                          for x in E.cell_list(f.agent, e))
        if isinstance(f, Box):
            return big_and(Box(f.agent, Imp(E.pre_formula(x), self.run(f.sub, x, E)))
                           for x in E.cell_list(f.agent, e))
        if isinstance(f, (DynDia, DynBox)):
            E2 = lookup_event(self.registry, f.event)
            x = E2.event_index(f.eid)
            pre, inner = E2.pre_formula(x), self.run(f.sub, x, E2)
            g = And(pre, inner) if isinstance(f, DynDia) else Imp(pre, inner)
            return self.run(g, e, E)
        if isinstance(f, Prob):
            def body(x):
                out = [(c, self.run(g, x, E)) for c, g in f.terms]
                return out + [(-f.bound, None)]

            terms = measure_terms(E, f.agent, e, body)
            return prob(f.agent, terms, Fraction(0), isinstance(f, ProbGt))
        raise TypeError(f"not a formula: {f!r}")


def translate_all(psi: Formula, E: EventStructureL, events: EventRegistry | None = None) -> tuple:
    """``translate(psi, e, E)`` for every event, sharing one memo."""
    registry = dict(events or {})
    registry.setdefault(E.name, E)
    t = _Translator(registry)
    return tuple(t.run(psi, e, E) for e in range(E.n))


def lift(M, E: EventStructureL, psi: Formula, events: EventRegistry | None = None, U=None) -> int:
    """Element of the updated algebra assembled from the translated blocks."""
    from ..update import update_model
    from .semantics import extensions

    registry = dict(events or {})
    registry.setdefault(E.name, E)
    if U is None:
        U = update_model(M, E, registry)
    blocks = extensions(M, translate_all(psi, E, registry), registry)
    return U.product.assemble(blocks) & U.prebar


__all__ = ["translate", "translate_all", "lift"]
