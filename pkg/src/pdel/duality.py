"""Complex algebras of relational models and the update duality check.

The complex algebra of a PES model is the powerset of its states with
diamond/box given by the agents' classes and measures summing state weights.
For an intuitionistic Kripke model the carrier is the lattice of up-sets.
Updating a model and then taking its complex algebra should agree, up to the
obvious bijection of points, with taking the complex algebra first and then
applying the algebraic update.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import BlockEHA, FiniteLattice, i_minimal, iter_bits
from .errors import ValidationError
from .measures import APEModel, APEStructure, domain, weight_measure
from .relational import (EventStructureL, IntKripkeModel, PESModel, classical_update, int_update,
                         intermediate_structure)
from .update import PrimeMeasure, ProductAlgebra, translate_event, update_model

# above this many lattice elements only join-irreducibles and a sample are compared
EXHAUSTIVE_LIMIT = 4096


def _mask(states) -> int:
    out = 0
    for s in states:
        out |= 1 << s
    return out


def _complex(M: PESModel, lattice: FiniteLattice) -> APEModel:
    A = BlockEHA(lattice, {i: tuple(_mask(c) for c in v.partition) for i, v in M.agents.items()})
    measures = {i: weight_measure(A, i, {s: Fraction(p) for s, p in enumerate(v.P)})
                for i, v in M.agents.items()}
    valuation = {p: _mask(ext) for p, ext in M.valuation.items()}
    return APEModel(APEStructure(A, measures), valuation)


def complex_algebra(M: PESModel) -> APEModel:
    """Powerset algebra of the states, bit ``s`` standing for state ``s``."""
    if isinstance(M, IntKripkeModel) and any(a != b for a, b in M.order):
        raise ValidationError("use upset_algebra for a model with a nontrivial order")
    return _complex(M, FiniteLattice([0] * M.n))


def upset_algebra(M: IntKripkeModel) -> APEModel:
    """Up-set algebra; bit ``s`` stands for the principal up-set of ``s``."""
    lower = [_mask(t for t in M.up(s) if t != s) for s in range(M.n)]
    return _complex(M, FiniteLattice(lower))


def _bit_map(pairs, n_states: int):
    """LHS bit k (updated-model point k = (s, e)) to product bit e*n+s."""
    return [e * n_states + s for s, e in pairs]


def _transport(x: int, bitmap) -> int:
    out = 0
    for k in iter_bits(x):
        out |= 1 << bitmap[k]
    return out


def _elements(L: FiniteLattice, sample: int, seed: int) -> list:
    if L.size <= EXHAUSTIVE_LIMIT:
        return list(L.elements)
    rng = random.Random(seed)
    return sorted(set(L.join_irreducibles()) | {0, L.top}
                  | {_random_element(L, rng) for _ in range(sample)})


def _compare_modal(A, B, T, xs, out):
    for x in xs:
        tx = T(x)
        for i in A.agents:
            if T(A.diamond(i, x)) != B.diamond(i, tx):
                out.append({"what": "diamond", "agent": i, "element": x})
            if T(A.box(i, x)) != B.box(i, tx):
                out.append({"what": "box", "agent": i, "element": x})


def _compare_implies(A, B, T, xs, sample, seed, out):
    rng = random.Random(seed + 1)
    for _ in range(min(sample, len(xs) ** 2)):
        x, y = rng.choice(xs), rng.choice(xs)
        if T(A.lattice.implies(x, y)) != B.lattice.implies(T(x), T(y)):
            out.append({"what": "implies", "elements": [x, y]})


def _compare_cells(A, B, T, out):
    for i in A.agents:
        if sorted(T(c) for c in i_minimal(A, i)) != sorted(i_minimal(B, i)):
            out.append({"what": "cells", "agent": i})


def check_duality(M: PESModel, E: EventStructureL, events=None, mode: str = "update",
                  sample: int = 256, seed: int = 0) -> dict:
    """Compare the relational and algebraic routes and report every disagreement.

    Modes:

    ``"intermediate"``
        complex algebra of the intermediate structure against the product
        algebra of the complex algebra (modalities, μ' and valuations);
    ``"update"``
        complex algebra of the updated model against the algebraic update of
        the complex algebra (including measures and valuations);
    ``"int-update"``
        the same for an intuitionistic model, using up-set algebras and the
        coproduct-weight update.

    Points correspond by (s, e) -> bit ``e*|S| + s`` of the product.
    """
    registry = dict(events or {})
    registry.setdefault(E.name, E)
    witnesses: list = []
    checked = {"elements": 0, "measure": 0}
    if mode == "intermediate":
        base = complex_algebra(M)
        inter = intermediate_structure(M, E, registry)
        P = ProductAlgebra(base.algebra, translate_event(E, base, events=registry))
        L = FiniteLattice([0] * len(inter.pairs))
        A = BlockEHA(L, {i: tuple(_mask(c) for c in part) for i, part in inter.agents.items()})
        bitmap = _bit_map(inter.pairs, M.n)
        T = lambda x: _transport(x, bitmap)  # noqa: E731
        xs = _elements(L, sample, seed)
        checked["elements"] = len(xs)
        _compare_modal(A, P, T, xs, witnesses)
        _compare_implies(A, P, T, xs, sample, seed, witnesses)
        _compare_cells(A, P, T, witnesses)
        for i in A.agents:
            prime = PrimeMeasure(base.structure, P.events, P, i)
            w = inter.weights[i]
            for x in domain(A, i):
                checked["measure"] += 1
                lv = sum((w[k] for k in iter_bits(x)), Fraction(0))
                rv = prime.value(T(x))
                if lv != rv:
                    witnesses.append({"what": "measure", "agent": i, "element": x,
                                      "lhs": str(lv), "rhs": str(rv)})
        for p, ext in sorted(inter.valuation.items()):
            if T(_mask(ext)) != P.constant(base.valuation[p]):
                witnesses.append({"what": "valuation", "atom": p})
        return _report(witnesses, checked, mode)

    if mode == "update":
        _, up = classical_update(M, E, registry)
        lhs, base = complex_algebra(up), complex_algebra(M)
    elif mode == "int-update":
        up = int_update(M, E)
        lhs, base = upset_algebra(up), upset_algebra(M)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    rhs = update_model(base, E, registry)
    bitmap = _bit_map(up.origin, M.n)
    T = lambda x: _transport(x, bitmap)  # noqa: E731
    A, B = lhs.algebra, rhs.algebra
    if T(A.lattice.universe) != rhs.prebar:
        witnesses.append({"what": "pre-bar", "lhs": T(A.lattice.universe), "rhs": rhs.prebar})
        return _report(witnesses, checked, mode)
    xs = _elements(A.lattice, sample, seed)
    checked["elements"] = len(xs)
    _compare_modal(A, B, T, xs, witnesses)
    _compare_implies(A, B, T, xs, sample, seed, witnesses)
    _compare_cells(A, B, T, witnesses)
    for i in A.agents:
        for x in domain(A, i):
            checked["measure"] += 1
            lv, rv = lhs.structure.measure(i).value(x), rhs.structure.measure(i).value(T(x))
            if lv != rv:
                witnesses.append({"what": "measure", "agent": i, "element": x,
                                  "lhs": str(lv), "rhs": str(rv)})
    for p in sorted(set(lhs.valuation) | set(rhs.valuation)):
        lv, rv = lhs.valuation.get(p), rhs.valuation.get(p)
        if lv is None or rv is None or T(lv) != rv:
            witnesses.append({"what": "valuation", "atom": p})
    return _report(witnesses, checked, mode)


def _random_element(L: FiniteLattice, rng: random.Random) -> int:
    out = 0
    for j in L.linear_extension():
        if rng.random() < 0.5:
            out |= L.down[j]
    return out


def _report(witnesses, checked, mode) -> dict:
    return {"mode": mode, "ok": not witnesses, "checked": checked, "witnesses": witnesses}
