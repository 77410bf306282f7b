"""Randomised check suites shared by the command line and the test-suite.

Every suite draws ``count`` independent instances from ``seed`` and returns
``{"suite", "count", "passed", "ok", "failures", "seconds"}``; an instance
passes when every comparison made on it is exact.
"""

from __future__ import annotations

import random
import time

from . import generators as g
from .algebra import check_eha_axioms, i_minimal, i_minimal_bruteforce, pseudo_quotient, \
    quotient_minimal_by_characterisation
from .duality import _mask, complex_algebra, check_duality
from .errors import Infeasible
from .logic.axioms import AXIOM_IDS
from .logic.formula import to_text
from .logic.rewrite import rewrite_static
from .logic.semantics import eval_algebraic
from .logic.soundness import check_reduction_axiom, check_static_axioms, random_instance
from .logic.translate import lift
from .measures import APEModel, validate
from .relational import classical_update, discrete_copy, int_update
from .synthesis import SignPattern, cells, pattern_holds, synthesize_measures
from .update import update_model

MAX_FAILURES = 10


def _rng(seed: int, k: int) -> random.Random:
    return random.Random(f"{seed}:{k}")


def _run(name: str, seed: int, count: int, one) -> dict:
    t0 = time.perf_counter()
    failures = []
    passed = 0
    for k in range(count):
        problems = one(_rng(seed, k))
        if problems:
            if len(failures) < MAX_FAILURES:
                failures.append({"instance": k, "problems": problems})
        else:
            passed += 1
    return {"suite": name, "count": count, "passed": passed, "ok": passed == count,
            "failures": failures, "seconds": round(time.perf_counter() - t0, 3)}


# duality -------------------------------------------------------------------------------


def _duality(rng):
    M, E = g.classical_pair(rng)
    out = []
    for mode in ("intermediate", "update"):
        r = check_duality(M, E, mode=mode)
        if not r["ok"]:
            out.append({"mode": mode, "witnesses": r["witnesses"][:3]})
    return out


def duality_suite(seed: int = 0, count: int = 200) -> dict:
    """Classical (M, E) pairs; both duality modes must agree exactly."""
    return _run("duality", seed, count, _duality)


def _int_duality(rng):
    M, E = g.int_pair(rng)
    r = check_duality(M, E, mode="int-update")
    return [] if r["ok"] else r["witnesses"][:3]


def int_duality_suite(seed: int = 0, count: int = 200) -> dict:
    """Ordered models with forest events: relational and algebraic updates agree."""
    return _run("int-duality", seed, count, _int_duality)


# reduction axioms and rewriting --------------------------------------------------------


def _registry(rng):
    return {"Ev": g.forest_event(rng, name="Ev"), "Cv": g.classical_event(rng, name="Cv")}


def _reduction(rng, per_axiom=1, formulas=1):
    M = g.ape_model(rng)
    reg = _registry(rng)
    out = []
    for ax in AXIOM_IDS:
        for _ in range(per_axiom):
            inst = random_instance(rng, ax, reg, g.ATOMS, g.AGENTS)
            if not check_reduction_axiom(M, ax, inst, reg)["ok"]:
                out.append({"axiom": ax, "instance": repr(inst)})
    for _ in range(formulas):
        f = g.dynamic_formula(rng, 3, reg, dyn_depth=2)
        if eval_algebraic(M, f, reg) != eval_algebraic(M, rewrite_static(f, reg), reg):
            out.append({"formula": to_text(f)})
    return out


def reduction_suite(seed: int = 0, count: int = 500, per_axiom: int = 1, formulas: int = 1) -> dict:
    """Each instance: a random APE model, ``per_axiom`` instances of every
    reduction axiom, and ``formulas`` dynamic formulas (nesting <= 2) compared
    with their rewritten static forms."""
    return _run("reduction", seed, count, lambda rng: _reduction(rng, per_axiom, formulas))


# translation -------------------------------------------------------------------------------


def _translation(rng):
    while True:  # redraw until some precondition holds somewhere
        M = g.ape_model(rng)
        reg = _registry(rng)
        E = reg["Ev"] if rng.random() < 0.7 else reg["Cv"]
        if _executable(M, E, reg):
            break
    f = g.dynamic_formula(rng, 3, reg, dyn_depth=1)
    U = update_model(M, E, reg)
    lv = eval_algebraic(U, f, reg)
    rv = lift(M, E, f, reg, U=U)
    return [] if lv == rv else [{"formula": to_text(f), "event": E.name}]


def _executable(M, E, reg) -> bool:
    pre = 0
    for e in range(E.n):
        pre |= eval_algebraic(M, E.pre_formula(e), reg)
    return pre != 0


def translation_suite(seed: int = 0, count: int = 200) -> dict:
    """Extension after an update equals the assembled translated extensions."""
    return _run("translation", seed, count, _translation)


# static validities -------------------------------------------------------------------------


def _static(rng):
    boolean = rng.random() < 0.3
    M = g.ape_model(rng, boolean=boolean)
    r = check_static_axioms(M, rng, g.ATOMS, g.AGENTS, per_axiom=2, boolean=boolean)
    return [{"axiom": f["axiom"], "formula": to_text(f["formula"])} for f in r["failures"]]


def static_suite(seed: int = 0, count: int = 100) -> dict:
    """Inequality and probability axioms, P4 and the mass-under-diamond lemma."""
    return _run("axioms", seed, count, _static)


# complex algebras, quotients ---------------------------------------------------------------


def _complex(rng):
    M = g.pes_model(rng)
    C = complex_algebra(M)
    A = C.algebra
    out = [v.as_dict() for v in check_eha_axioms(A)]
    for i in A.agents:
        out += [v.as_dict() for v in validate(C.structure.measure(i), A, strict=True)]
        want = sorted(_mask(c) for c in M.agents[i].partition)
        if sorted(i_minimal(A, i)) != want or sorted(i_minimal_bruteforce(A, i)) != want:
            out.append({"agent": i, "what": "cells"})
    return out


def complex_algebra_suite(seed: int = 0, count: int = 200) -> dict:
    """Complex algebras are EHAs with strict measures and cells as i-minimal elements."""
    return _run("measures", seed, count, _complex)


def _quotient(rng):
    A = g.block_eha(rng)
    a = g.random_element(rng, A.lattice)
    Q = pseudo_quotient(A, a)
    out = []
    for i in A.agents:
        generic = sorted(i_minimal_bruteforce(Q, i))
        if generic != sorted(quotient_minimal_by_characterisation(A, a, i)):
            out.append({"agent": i, "divisor": a})
    return out


def quotient_suite(seed: int = 0, count: int = 50) -> dict:
    """Cells of a pseudo-quotient are the nonbottom traces of the base cells."""
    return _run("quotient", seed, count, _quotient)


# synthesis ---------------------------------------------------------------------------------


def random_pattern(rng, M: APEModel, i: str, atoms: int = 3) -> SignPattern:
    """Pattern read off ``M`` itself, hence satisfiable."""
    sub = lambda: g.static_formula(rng, 2, g.ATOMS, g.AGENTS, probability=False)  # noqa: E731
    fs = [g.prob_atom(rng, sub, agents=(i,)) for _ in range(rng.randint(1, atoms))]
    cs = cells(M.algebra, i)
    bits = []
    for f in fs:
        ext = eval_algebraic(M, f)
        bits.append({k: int(c & ~ext == 0) for k, c in enumerate(cs)})
    return SignPattern(i, fs, bits)


def _synthesis(rng):
    M = g.ape_model(rng)
    pats = {i: random_pattern(rng, M, i) for i in M.algebra.agents if rng.random() < 0.8}
    S = synthesize_measures(M.algebra, pats, M.valuation)
    N = APEModel(S, M.valuation)
    out = []
    for i in M.algebra.agents:
        out += [v.as_dict() for v in validate(S.measure(i), M.algebra, strict=True)]
    for p in pats.values():
        out += pattern_holds(N, p)
    return out


def contradictory_pattern(rng, M: APEModel, i: str) -> SignPattern:
    """``t >= β`` and ``-t > -β`` both required on one cell."""
    from .logic.formula import prob
    sub = g.static_formula(rng, 2, g.ATOMS, g.AGENTS, probability=False)
    terms = [(rng.choice(g.COEFFS), sub)]
    beta = rng.choice(g.BOUNDS)
    k = rng.randrange(len(cells(M.algebra, i)))
    pos = prob(i, terms, beta)
    neg = prob(i, [(-c, f) for c, f in terms], -beta, strict=True)
    return SignPattern(i, [pos, neg], [{k: 1}, {k: 1}])


def _contradiction(rng):
    M = g.ape_model(rng)
    i = rng.choice(sorted(M.algebra.agents))
    try:
        synthesize_measures(M.algebra, {i: contradictory_pattern(rng, M, i)}, M.valuation)
    except Infeasible:
        return []
    return [{"agent": i, "what": "contradictory pattern was solved"}]


def synthesis_suite(seed: int = 0, count: int = 30, contradictions: int = 10) -> dict:
    """Satisfiable patterns are realised exactly; contradictory ones are Infeasible."""
    a = _run("synthesis", seed, count, _synthesis)
    b = _run("synthesis-infeasible", seed + 1, contradictions, _contradiction)
    a["count"] += b["count"]
    a["passed"] += b["passed"]
    a["ok"] = a["ok"] and b["ok"]
    a["failures"] += b["failures"]
    a["seconds"] = round(a["seconds"] + b["seconds"], 3)
    return a


# classical degenerate case ------------------------------------------------------------------


def _views(M):
    return {i: (v.partition, v.P) for i, v in M.agents.items()}


def _degenerate(rng):
    M, E = g.classical_pair(rng, modal=False)
    _, C = classical_update(M, E)
    I = int_update(discrete_copy(M), E)
    out = []
    if list(C.origin) != list(I.origin):
        out.append({"what": "points"})
    elif _views(C) != _views(I):
        out.append({"what": "probabilities"})
    elif {p: frozenset(x) for p, x in C.valuation.items()} != {p: frozenset(x) for p, x in I.valuation.items()}:
        out.append({"what": "valuation"})
    return out


def degenerate_suite(seed: int = 0, count: int = 100) -> dict:
    """On discrete orders the intuitionistic update is the classical one."""
    return _run("degenerate", seed, count, _degenerate)


SUITES = {
    "axioms": static_suite,
    "duality": duality_suite,
    "reduction": reduction_suite,
    "measures": complex_algebra_suite,
    "translation": translation_suite,
    "quotient": quotient_suite,
    "synthesis": synthesis_suite,
    "degenerate": degenerate_suite,
    "int-duality": int_duality_suite,
}

__all__ = ["SUITES"] + [f.__name__ for f in SUITES.values()]
