"""Executable soundness checks.

Reduction axioms are checked by evaluating both sides of an instance in a
model. Static axioms (inequalities, probabilities) are checked by building an
instance formula and asking for valuation top. Equalities between linear
terms are encoded as two ``>=`` atoms.
"""

from __future__ import annotations

import random
from fractions import Fraction

from ..measures import APEModel
from ..relational import EventRegistry, lookup_event
from . import axioms
from .axioms import AXIOM_IDS, Instance
from .formula import TOP, And, Atom, Box, Dia, Formula, Iff, Imp, Or, prob
from .semantics import eval_algebraic, extensions

STATIC_AXIOMS = ("N0", "N1", "N2", "N3", "N4", "N5", "N6", "P1", "P2", "P3", "P4", "P5")
LEMMA_FORMS = ("L-geq", "L-lt")


# reduction axioms ------------------------------------------------------------------


def check_reduction_axiom(M: APEModel, ax: str, inst: Instance, events: EventRegistry | None = None) -> dict:
    """Evaluate both sides of an instance; ``ok`` when the valuations agree."""
    lookup = lambda name: lookup_event(events or {}, name)  # noqa: E731
    left, right = axioms.axiom_pair(ax, inst, lookup)
    lv, rv = extensions(M, [left, right], events)
    return {"axiom": ax, "ok": lv == rv, "lhs": lv, "rhs": rv}


def random_instance(rng: random.Random, ax: str, events: EventRegistry, atoms, agents,
                    depth: int = 2) -> Instance:
    """Random instance of ``ax`` with static operands over ``atoms``."""
    from ..generators import COEFFS, BOUNDS, static_formula

    if ax not in AXIOM_IDS:
        raise ValueError(f"unknown axiom {ax}")
    k = int(ax[1:])
    name = rng.choice(sorted(events))
    eid = rng.choice(events[name].events)
    sub = lambda: static_formula(rng, depth, atoms, agents)  # noqa: E731
    base = dict(event=name, eid=eid)
    if k in (1, 2):
        return Instance(psi=Atom(rng.choice(atoms)), **base)
    if k <= 6:
        return Instance(**base)
    if k <= 12:
        return Instance(psi=sub(), psi2=sub(), **base)
    if k <= 16:
        return Instance(psi=sub(), agent=rng.choice(agents), **base)
    terms = tuple((rng.choice(COEFFS), sub()) for _ in range(rng.randint(1, 2)))
    return Instance(agent=rng.choice(agents), terms=terms, bound=rng.choice(BOUNDS),
                    strict=rng.random() < 0.25, **base)


# static axioms ---------------------------------------------------------------------


def neg_terms(terms) -> tuple:
    return tuple((-c, f) for c, f in terms)


def eq(agent: str, left, right, const=Fraction(0)) -> Formula:
    """Σ left = Σ right + const, as two inequalities."""
    diff = tuple(left) + neg_terms(right)
    return And(prob(agent, diff, const), prob(agent, neg_terms(diff), -const))


def static_instance(rng: random.Random, name: str, atoms, agents, depth: int = 2) -> Formula:
    """Random instance of a static axiom; every instance should be valid."""
    from ..generators import COEFFS, BOUNDS, static_formula

    i = rng.choice(agents)
    f = lambda: static_formula(rng, depth, atoms, agents)  # noqa: E731

    def terms(n=None):
        return tuple((rng.choice(COEFFS), f()) for _ in range(n or rng.randint(1, 3)))

    beta = rng.choice(BOUNDS)
    if name == "N0":
        t = terms()
        return prob(i, t + neg_terms(t), 0)
    if name == "N1":
        t = terms()
        return Iff(prob(i, t, beta), prob(i, t + ((Fraction(0), f()),), beta))
    if name == "N2":
        t = list(terms())
        perm = t[:]
        rng.shuffle(perm)
        return Imp(prob(i, t, beta), prob(i, perm, beta))
    if name == "N3":
        phis = [f() for _ in range(rng.randint(1, 3))]
        a = [rng.choice(COEFFS) for _ in phis]
        b = [rng.choice(COEFFS) for _ in phis]
        beta2 = rng.choice(BOUNDS)
        return Imp(And(prob(i, zip(a, phis), beta), prob(i, zip(b, phis), beta2)),
                   prob(i, [(x + y, p) for x, y, p in zip(a, b, phis)], beta + beta2))
    if name == "N4":
        t = terms()
        d = rng.choice(COEFFS + (Fraction(0),))
        # "d >= 0" is the atom with no terms: 0 >= -d
        return Imp(And(prob(i, t, beta), prob(i, (), -d)),
                   prob(i, [(d * c, g) for c, g in t], d * beta))
    if name == "N5":
        t = terms()
        return Or(prob(i, t, beta), prob(i, neg_terms(t), -beta))
    if name == "N6":
        t = terms()
        gamma = beta - Fraction(rng.randint(1, 6), rng.randint(1, 6))
        return Imp(prob(i, t, beta), prob(i, t, gamma, strict=True))
    if name == "P1":
        from .formula import BOT
        return eq(i, [(1, BOT)], [])
    if name == "P2":
        return eq(i, [(1, TOP)], [], Fraction(1))
    if name == "P3":
        a, b = f(), f()
        return eq(i, [(1, a), (1, b)], [(1, Or(a, b)), (1, And(a, b))])
    if name == "P4":
        a, b = f(), f()
        return p4_big(i, a, b)
    if name == "P5":
        sigma = prob(i, terms(), beta, strict=rng.random() < 0.25)
        return Imp(sigma, Box(i, sigma))
    raise ValueError(f"unknown static axiom {name}")


def p4_left(agent: str, phi: Formula, psi: Formula) -> Formula:
    return And(Box(agent, Imp(phi, psi)), eq(agent, [(1, phi)], [(1, psi)]))


def p4_big(agent: str, phi: Formula, psi: Formula) -> Formula:
    """The intuitionistic axiom: box-implication plus equal measure iff box-equivalence."""
    return Iff(p4_left(agent, phi, psi), Box(agent, Iff(psi, phi)))


def p4_classical(agent: str, phi: Formula) -> Formula:
    """The classical axiom: box phi iff measure one."""
    return Iff(Box(agent, phi), eq(agent, [(1, phi)], [], Fraction(1)))


def lemma_instance(rng: random.Random, form: str, atoms, agents, depth: int = 2) -> Formula:
    """Mass under a diamond: conditioning on ◇ψ preserves (strict) bounds at ◇ψ."""
    from ..generators import COEFFS, BOUNDS, static_formula

    i = rng.choice(agents)
    f = lambda: static_formula(rng, depth, atoms, agents)  # noqa: E731
    d = Dia(i, f())
    phis = [f() for _ in range(rng.randint(1, 3))]
    alphas = [rng.choice(COEFFS) for _ in phis]
    beta = rng.choice(BOUNDS)
    plain = list(zip(alphas, phis))
    cond = [(a, And(p, d)) for a, p in plain]
    if form == "L-geq":
        return Imp(And(d, prob(i, plain, beta)), prob(i, cond, beta))
    if form == "L-lt":
        # "t < beta" is the strict atom -t > -beta
        return Imp(And(d, prob(i, neg_terms(plain), -beta, strict=True)),
                   prob(i, neg_terms(cond), -beta, strict=True))
    raise ValueError(f"unknown lemma form {form}")


def is_valid(M: APEModel, f: Formula, events: EventRegistry | None = None) -> bool:
    return eval_algebraic(M, f, events) == M.algebra.lattice.top


def p4_left_to_right(M: APEModel, agent: str, phi: Formula, psi: Formula) -> bool:
    left, right = extensions(M, [p4_left(agent, phi, psi), Box(agent, Iff(psi, phi))])
    return left & ~right == 0


def p4_agree(M: APEModel, agent: str, phi: Formula) -> bool:
    """Whether the classical and intuitionistic forms (psi := true) have equal valuations."""
    a, b = extensions(M, [p4_classical(agent, phi), p4_big(agent, phi, TOP)])
    return a == b


def check_static_axioms(M: APEModel, rng: random.Random, atoms, agents, per_axiom: int = 5,
                        boolean: bool = False) -> dict:
    """Random instances of every static axiom and lemma form on ``M``."""
    from ..generators import static_formula

    failures = []
    count = 0
    for name in STATIC_AXIOMS:
        for _ in range(per_axiom):
            f = static_instance(rng, name, atoms, agents)
            count += 1
            if not is_valid(M, f):
                failures.append({"axiom": name, "formula": f})
    for form in LEMMA_FORMS:
        for _ in range(per_axiom):
            f = lemma_instance(rng, form, atoms, agents)
            count += 1
            if not is_valid(M, f):
                failures.append({"axiom": form, "formula": f})
    for _ in range(per_axiom):
        i = rng.choice(agents)
        phi, psi = static_formula(rng, 2, atoms, agents), static_formula(rng, 2, atoms, agents)
        count += 1
        if not p4_left_to_right(M, i, phi, psi):
            failures.append({"axiom": "P4-ltr", "formula": p4_left(i, phi, psi)})
        if boolean:
            count += 1
            if not (p4_agree(M, i, phi) and is_valid(M, p4_classical(i, phi))):
                failures.append({"axiom": "p4", "formula": p4_classical(i, phi)})
    return {"ok": not failures, "checked": count, "failures": failures}


__all__ = ["STATIC_AXIOMS", "LEMMA_FORMS", "check_reduction_axiom", "random_instance", "static_instance",
           "lemma_instance", "is_valid", "p4_left", "p4_big", "p4_classical", "p4_left_to_right",
           "p4_agree", "check_static_axioms", "eq"]
