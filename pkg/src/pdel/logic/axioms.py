"""Reduction axioms I1-I18: left sides, right sides and matching.

One table serves both the rewriter (left to right, one step at a time) and
the soundness harness (evaluate both sides and compare). Right sides only
look up the event structure when they need it, so ``[Ev,e1] true`` reduces
without a registry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..relational import EventStructureL
from .formula import (BOT, TOP, And, Atom, Bot, Box, Dia, DynBox, DynDia, Formula, Imp, Or, Prob,
                      ProbGt, Top, big_and, big_or, prob)

AXIOM_IDS = tuple(f"I{k}" for k in range(1, 19))

Lookup = Callable[[str], EventStructureL]


@dataclass(frozen=True)
class Instance:
    """Metavariables of an axiom instance.

    ``psi``/``psi2`` are the operands; for I1/I2 ``psi`` must be an atom; for
    I13-I16 ``agent`` names the modality; for I17/I18 ``terms``, ``bound``
    and ``strict`` describe the probability atom (agent ``agent``).
    """

    event: str
    eid: str
    psi: Formula = TOP
    psi2: Formula = TOP
    agent: str = ""
    terms: tuple = ()
    bound: Fraction = Fraction(0)
    strict: bool = False


def _inner(ax: str, inst: Instance) -> Formula:
    k = int(ax[1:])
    if k in (1, 2):
        if not isinstance(inst.psi, Atom):
            raise ValueError(f"{ax} needs an atom")
        return inst.psi
    if k in (3, 4):
        return TOP
    if k in (5, 6):
        return BOT
    if k in (7, 8):
        return And(inst.psi, inst.psi2)
    if k in (9, 10):
        return Or(inst.psi, inst.psi2)
    if k in (11, 12):
        return Imp(inst.psi, inst.psi2)
    if k in (13, 14):
        return Dia(inst.agent, inst.psi)
    if k in (15, 16):
        return Box(inst.agent, inst.psi)
    return prob(inst.agent, inst.terms, inst.bound, inst.strict)


def lhs(ax: str, inst: Instance) -> Formula:
    """Left side: odd axioms use the box form ``[E,e]``, even ones ``<E,e>``."""
    if ax not in AXIOM_IDS:
        raise ValueError(f"unknown axiom {ax}")
    cls = DynBox if int(ax[1:]) % 2 else DynDia
    return cls(inst.event, inst.eid, _inner(ax, inst))


def match(f: Formula) -> tuple[str, Instance]:
    """The axiom whose left side is ``f`` (a dynamic node) and its instance."""
    if not isinstance(f, (DynBox, DynDia)):
        raise ValueError("not a dynamic formula")
    odd = isinstance(f, DynBox)
    g = f.sub
    base = dict(event=f.event, eid=f.eid)
    if isinstance(g, Atom):
        k, inst = 1, Instance(psi=g, **base)
    elif isinstance(g, Top):
        k, inst = 3, Instance(**base)
    elif isinstance(g, Bot):
        k, inst = 5, Instance(**base)
    elif isinstance(g, And):
        k, inst = 7, Instance(psi=g.left, psi2=g.right, **base)
    elif isinstance(g, Or):
        k, inst = 9, Instance(psi=g.left, psi2=g.right, **base)
    elif isinstance(g, Imp):
        k, inst = 11, Instance(psi=g.left, psi2=g.right, **base)
    elif isinstance(g, Dia):
        k, inst = 13, Instance(psi=g.sub, agent=g.agent, **base)
    elif isinstance(g, Box):
        k, inst = 15, Instance(psi=g.sub, agent=g.agent, **base)
    elif isinstance(g, Prob):
        k, inst = 17, Instance(agent=g.agent, terms=g.terms, bound=g.bound,
                               strict=isinstance(g, ProbGt), **base)
    else:
        raise ValueError(f"no reduction axiom for a dynamic operator over {type(g).__name__}")
    return f"I{k if odd else k + 1}", inst


def merge_terms(terms) -> tuple:
    """Collect coefficients of equal formulas (first occurrence order), drop zeros."""
    acc: dict = {}
    for c, f in terms:
        acc[f] = acc.get(f, Fraction(0)) + Fraction(c)
    return tuple((c, f) for f, c in acc.items() if c != 0)


def measure_terms(E: EventStructureL, agent: str, e: int, body) -> tuple:
    """Linear terms for Σ_{e'~e, φ} coef · μ^φ(body(e')) with μ^φ expanded.

    ``body(e')`` returns a list of (coefficient, formula or None); None stands
    for the formula true, contributing μ(φ) itself.
    """
    out = []
    P = E.agents[agent].P
    for e2 in E.cell_list(agent, e):
        for j in E.admissible(e2):
            w = P[e2] * E.pre[e2][j]
            for c, x in body(e2):
                coef = c * w
                out.append((coef, E.phi[j] if x is None else And(x, E.phi[j])))
                for s in E.mb(j):
                    out.append((-coef, E.phi[s] if x is None else And(x, E.phi[s])))
    return merge_terms(out)


def rhs(ax: str, inst: Instance, lookup: Lookup) -> Formula:
    """Right side of the axiom instance; ``lookup`` resolves the event name."""
    k = int(ax[1:])
    if k == 3:
        return TOP
    if k == 6:
        return BOT
    E = lookup(inst.event)
    e = E.event_index(inst.eid)
    pre = E.pre_formula(e)
    box = lambda x: DynBox(inst.event, inst.eid, x)  # noqa: E731
    dia = lambda x: DynDia(inst.event, inst.eid, x)  # noqa: E731
    if k in (1, 2):
        s = E.sub[e].get(inst.psi.name, inst.psi)
        return Imp(pre, s) if k == 1 else And(pre, s)
    if k == 4:
        return pre
    if k == 5:
        return Imp(pre, BOT)
    if k == 7:
        return And(box(inst.psi), box(inst.psi2))
    if k == 8:
        return And(dia(inst.psi), dia(inst.psi2))
    if k == 9:
        return Imp(pre, Or(dia(inst.psi), dia(inst.psi2)))
    if k == 10:
        return Or(dia(inst.psi), dia(inst.psi2))
    if k == 11:
        return Imp(dia(inst.psi), dia(inst.psi2))
    if k == 12:
        return And(pre, Imp(dia(inst.psi), dia(inst.psi2)))
    i = inst.agent
    cell = [E.events[x] for x in E.cell_list(i, e)]
    if k in (13, 14):
        body = big_or(Dia(i, DynDia(inst.event, x, inst.psi)) for x in cell)
        return Imp(pre, body) if k == 13 else And(pre, body)
    if k in (15, 16):
        body = big_and(Box(i, DynBox(inst.event, x, inst.psi)) for x in cell)
        return Imp(pre, body) if k == 15 else And(pre, body)

    # I17 / I18
    def body(e2):
        inner = [(c, DynBox(inst.event, E.events[e2], f)) for c, f in inst.terms]
        return inner + [(-inst.bound, None)]

    atom = prob(i, measure_terms(E, i, e, body), Fraction(0), inst.strict)
    return Imp(pre, atom) if k == 17 else And(pre, atom)


def axiom_pair(ax: str, inst: Instance, lookup: Lookup) -> tuple[Formula, Formula]:
    return lhs(ax, inst), rhs(ax, inst, lookup)
