"""Algebraic interpretation of formulas in APE models.

Extensions are elements (bitmasks) of the model's algebra. Dynamic modalities
are interpreted through the product update: the event-``e`` block of the
extension in the updated model, guarded by the event's precondition.
"""

from __future__ import annotations

from fractions import Fraction

from ..algebra import i_minimal
from ..errors import CyclicEventReference, DegenerateQuotient, MissingMeasure, OutOfDomain, UninterpretedSubformula, UnknownAtom
from ..measures import APEModel
from ..relational import EventRegistry, lookup_event
from .formula import (And, Atom, Bot, Box, Dia, DynBox, DynDia, Formula, Imp, Or, Prob, ProbGt, Top,
                      subformulas)


class _Context:
    """Per-call memo of extensions and updated models."""

    def __init__(self, events: EventRegistry | None):
        self.events = events or {}
        self.ext: dict = {}
        self.updates: dict = {}
        self.stack: list = []
        self.keep: list = []

    def update(self, M: APEModel, name: str):
        """Updated model, or None when no precondition holds anywhere."""
        from ..update import update_model

        key = (id(M), name)
        if key in self.updates:
            return self.updates[key]
        if name in self.stack:
            raise CyclicEventReference(f"event structure {name} refers to itself", witness=name)
        self.stack.append(name)
        try:
            E = lookup_event(self.events, name)
            hit = update_model(M, E, interpret=lambda f: _ev(M, f, self))
        except DegenerateQuotient:
            hit = None
        finally:
            self.stack.pop()
        self.keep.append(M)
        self.updates[key] = hit
        return hit


def eval_algebraic(M: APEModel, f: Formula, events: EventRegistry | None = None) -> int:
    """Extension of ``f`` in ``M`` as an element of its algebra."""
    return _ev(M, f, _Context(events))


def extensions(M: APEModel, formulas, events: EventRegistry | None = None) -> list:
    """Extensions of several formulas sharing one memo."""
    ctx = _Context(events)
    return [_ev(M, f, ctx) for f in formulas]


def prob_extension(M: APEModel, agent: str, exts, bound: Fraction, strict: bool) -> int:
    """Join of the agent's cells whose weighted mass meets the bound."""
    A = M.algebra
    mu = M.structure.measure(agent)
    out = 0
    for a in i_minimal(A, agent):
        total = sum((c * mu.value(x & a) for c, x in exts), Fraction(0))
        if total > bound or (not strict and total == bound):
            out |= a
    return out


def _ev(M: APEModel, f: Formula, ctx: _Context) -> int:
    key = (id(M), f)
    hit = ctx.ext.get(key)
    if hit is not None:
        return hit
    A = M.algebra
    L = A.lattice
    if isinstance(f, Atom):
        try:
            r = M.valuation[f.name]
        except KeyError:
            raise UnknownAtom(f"atom {f.name} has no valuation", witness=f.name) from None
    elif isinstance(f, Top):
        r = L.top
    elif isinstance(f, Bot):
        r = 0
    elif isinstance(f, And):
        r = _ev(M, f.left, ctx) & _ev(M, f.right, ctx)
    elif isinstance(f, Or):
        r = _ev(M, f.left, ctx) | _ev(M, f.right, ctx)
    elif isinstance(f, Imp):
        r = L.implies(_ev(M, f.left, ctx), _ev(M, f.right, ctx))
    elif isinstance(f, Dia):
        r = A.diamond(f.agent, _ev(M, f.sub, ctx))
    elif isinstance(f, Box):
        r = A.box(f.agent, _ev(M, f.sub, ctx))
    elif isinstance(f, Prob):
        exts = [(c, _ev(M, g, ctx)) for c, g in f.terms]
        r = prob_extension(M, f.agent, exts, f.bound, isinstance(f, ProbGt))
    elif isinstance(f, (DynDia, DynBox)):
        U = ctx.update(M, f.event)
        if U is None:
            # nothing can happen: the update is the trivial algebra
            lookup_event(ctx.events, f.event).event_index(f.eid)
            return 0 if isinstance(f, DynDia) else L.top
        e = U.event.event_index(f.eid)
        pb = U.product.block(U.prebar, e)
        x = U.product.block(_ev(U, f.sub, ctx) & U.prebar, e)
        r = x & pb if isinstance(f, DynDia) else L.implies(pb, x)
    else:
        raise TypeError(f"not a formula: {f!r}")
    ctx.ext[key] = r
    return r


def interpret(M: APEModel, f: Formula, table: dict | None = None,
              events: EventRegistry | None = None) -> int:
    """Extension of ``f`` using a partial interpretation table first.

    Subformulas found in ``table`` are taken from it; an atom missing from
    both the table and the valuation raises ``UninterpretedSubformula``.
    """
    table = table or {}
    if f in table:
        return table[f]
    if isinstance(f, Atom) and f.name not in M.valuation:
        raise UninterpretedSubformula(f"no interpretation for {f}", witness=str(f))
    if isinstance(f, Prob) and f.agent not in M.measures:
        raise MissingMeasure(f"no measure for agent {f.agent}", witness=f.agent)
    ctx = _Context(events)
    for g, x in table.items():
        ctx.ext[(id(M), g)] = x
    for g in subformulas(f):
        if isinstance(g, Atom) and g not in table and g.name not in M.valuation:
            raise UninterpretedSubformula(f"no interpretation for {g}", witness=str(g))
    return _ev(M, f, ctx)


__all__ = ["eval_algebraic", "extensions", "interpret", "prob_extension", "OutOfDomain"]
