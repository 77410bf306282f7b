import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pdel import generators as g
from pdel.algebra import iter_bits
from pdel.duality import complex_algebra, upset_algebra
from pdel.errors import NonTermination, UnknownAtom, UnknownEventName
from pdel.logic import eval_algebraic, lift, parse, rewrite_static, rewrite_with_trace, to_text, translate
from pdel.logic.axioms import AXIOM_IDS, Instance, axiom_pair, match, merge_terms
from pdel.logic.formula import BOT, TOP, Atom, DynBox, DynDia, Imp, Not, apply_substitution, is_static
from pdel.logic.soundness import (check_reduction_axiom, check_static_axioms, p4_agree, p4_left_to_right,
                                  random_instance)
from pdel.relational import AgentView, EventStructureL, PESModel, classical_update, truth_set
from pdel.update import update_model

p = Atom("p")
seeds = st.integers(0, 10_000)


def registry(rng):
    return {"Ev": g.forest_event(rng, name="Ev"), "Cv": g.classical_event(rng, name="Cv")}


# algebraic semantics ---------------------------------------------------------------------


def test_constants():
    M = g.ape_model(random.Random(1))
    assert eval_algebraic(M, TOP) == M.algebra.top
    assert eval_algebraic(M, BOT) == 0


def test_probability_clause_on_the_vee_model(art):
    M, _ = art
    C = complex_algebra(PESModel(M.states, M.agents, M.valuation))
    assert eval_algebraic(C, parse("pr[i](1*mu(p) >= 3/10)")) == C.algebra.top
    assert eval_algebraic(C, parse("pr[i](1*mu(p) > 3/10)")) == 0
    V = upset_algebra(M)
    assert eval_algebraic(V, parse("p | ~p")) == 0b110
    assert eval_algebraic(V, parse("~~(p | ~p)")) == V.algebra.top


def test_unknown_names():
    M = g.ape_model(random.Random(1))
    with pytest.raises(UnknownAtom):
        eval_algebraic(M, Atom("zz"))
    with pytest.raises(UnknownEventName):
        eval_algebraic(M, parse("[Nope,e1] p"), {})


@given(seeds)
def test_complex_algebra_agrees_with_classical_truth(seed):
    rng = random.Random(seed)
    M = g.pes_model(rng)
    C = complex_algebra(M)
    f = g.static_formula(rng, 3)
    assert set(iter_bits(eval_algebraic(C, f))) == set(truth_set(M, f))


@given(seeds)
def test_dynamic_formulas_agree_on_complex_algebras(seed):
    rng = random.Random(seed)
    M, E = g.classical_pair(rng)
    reg = {E.name: E}
    f = g.dynamic_formula(rng, 3, reg, dyn_depth=1)
    C = complex_algebra(M)
    assert set(iter_bits(eval_algebraic(C, f, reg))) == set(truth_set(M, f, reg))


@given(seeds)
def test_probability_atoms_land_in_the_diamond_image(seed):
    rng = random.Random(seed)
    M = g.ape_model(rng)
    f = g.prob_atom(rng, lambda: g.static_formula(rng, 2))
    x = eval_algebraic(M, f)
    assert M.algebra.diamond(f.agent, x) == x


def test_degenerate_update():
    M = PESModel(("u",), {"i": AgentView((frozenset({0}),), (F(1),))}, {"p": set()}).validate()
    C = complex_algebra(M)
    E = EventStructureL("Ann", ("e",), {"i": AgentView((frozenset({0}),), (F(1),))},
                        (p,), ((F(1),),), ({},)).validate()
    reg = {"Ann": E}
    assert eval_algebraic(C, parse("<Ann,e> true"), reg) == 0
    assert eval_algebraic(C, parse("[Ann,e] false"), reg) == C.algebra.top
    assert rewrite_static(parse("[Ann,e] false"), reg) != parse("[Ann,e] false")
    assert eval_algebraic(C, rewrite_static(parse("[Ann,e] false"), reg), reg) == C.algebra.top


# rewriting -----------------------------------------------------------------------------------


def test_box_of_an_atom(art):
    _, E = art
    reg = {"Art": E}
    assert rewrite_static(parse("[Art,e1] p"), reg) == Imp(E.pre_formula(0), p)
    assert rewrite_static(parse("[Art,e3] apply"), reg) == Imp(E.pre_formula(2), BOT)


def test_constants_rewrite(art):
    _, E = art
    reg = {"Art": E}
    assert rewrite_static(parse("<Art,e1> false"), reg) == BOT
    assert rewrite_static(parse("[Art,e1] true"), reg) == TOP


def test_trace(art):
    _, E = art
    out, trace = rewrite_with_trace(parse("[Art,e1] (p & exhibit)"), {"Art": E})
    assert [t["axiom"] for t in trace] == ["I7", "I1", "I1"]
    assert trace[0] == {"axiom": "I7", "before": "[Art,e1] (p & exhibit)",
                        "after": "[Art,e1] p & [Art,e1] exhibit"}
    assert is_static(out)


def test_budget(art):
    _, E = art
    with pytest.raises(NonTermination):
        rewrite_static(parse("[Art,e1] [Art,e2] pr[i](mu(p) >= 1/2)"), {"Art": E}, budget=3)


def test_unknown_event(art):
    _, E = art
    with pytest.raises(UnknownEventName):
        rewrite_static(parse("[Nope,e1] p"), {"Art": E})
    with pytest.raises(UnknownEventName):
        rewrite_static(parse("[Art,e9] p"), {"Art": E})


def test_match_recognises_every_axiom(art):
    _, E = art
    lookup = {"Art": E}.__getitem__
    rng = random.Random(0)
    for ax in AXIOM_IDS:
        inst = random_instance(rng, ax, {"Art": E}, ("p",), ("i",))
        left, _ = axiom_pair(ax, inst, lookup)
        assert match(left)[0] == ax


def test_merge_terms_drops_zeros():
    assert merge_terms([(F(1), p), (F(-1), p), (F(2), TOP)]) == ((F(2), TOP),)


@given(seeds)
def test_rewrite_is_sound(seed):
    rng = random.Random(seed)
    M = g.ape_model(rng)
    reg = registry(rng)
    f = g.dynamic_formula(rng, 3, reg, dyn_depth=2)
    out = rewrite_static(f, reg)
    assert is_static(out)
    assert eval_algebraic(M, f, reg) == eval_algebraic(M, out, reg)


@given(seeds)
def test_rewrite_output_roundtrips(seed):
    rng = random.Random(seed)
    reg = registry(rng)
    out = rewrite_static(g.dynamic_formula(rng, 3, reg, dyn_depth=2), reg)
    assert parse(to_text(out)) == out


# reduction axioms --------------------------------------------------------------------------


def test_box_true_on_any_model():
    M = g.ape_model(random.Random(3))
    reg = registry(random.Random(3))
    r = check_reduction_axiom(M, "I3", Instance("Ev", reg["Ev"].events[0]), reg)
    assert r["ok"] and r["lhs"] == M.algebra.top


@pytest.mark.parametrize("ax", AXIOM_IDS)
def test_reduction_axiom(ax):
    rng = random.Random(ax)
    for _ in range(15):
        M = g.ape_model(rng)
        reg = registry(rng)
        inst = random_instance(rng, ax, reg, g.ATOMS, g.AGENTS)
        r = check_reduction_axiom(M, ax, inst, reg)
        assert r["ok"], (ax, inst)


@given(seeds)
def test_probability_axiom_on_complex_algebras(seed):
    rng = random.Random(seed)
    M, E = g.classical_pair(rng)
    C = complex_algebra(M)
    reg = {E.name: E}
    for ax in ("I17", "I18"):
        inst = random_instance(rng, ax, reg, g.ATOMS, g.AGENTS)
        assert check_reduction_axiom(C, ax, inst, reg)["ok"]


# static validities ---------------------------------------------------------------------------


@given(seeds, st.booleans())
def test_static_axioms(seed, boolean):
    rng = random.Random(seed)
    M = g.ape_model(rng, boolean=boolean)
    r = check_static_axioms(M, rng, g.ATOMS, g.AGENTS, per_axiom=2, boolean=boolean)
    assert r["ok"], [(f["axiom"], to_text(f["formula"])) for f in r["failures"]]


@given(seeds)
def test_p4_on_boolean_models(seed):
    rng = random.Random(seed)
    M = g.ape_model(rng, boolean=True)
    phi, psi = g.static_formula(rng, 2), g.static_formula(rng, 2)
    for i in g.AGENTS:
        assert p4_agree(M, i, phi)
        assert p4_left_to_right(M, i, phi, psi)


# translation ---------------------------------------------------------------------------------


def test_translate_atom_identity(art):
    _, E = art
    assert translate(p, "e1", E) == p
    assert translate(Atom("apply"), "e3", E) == BOT


def test_translate_diamond(art):
    _, E = art
    out = translate(parse("dia[i] p"), "e2", E)
    assert to_text(out) == "dia[i] (p & (true | p | ~p)) | dia[i] (p & (true | p | ~p))"


@given(seeds)
def test_translation_lemma(seed):
    rng = random.Random(seed)
    while True:
        M = g.ape_model(rng)
        reg = registry(rng)
        E = reg[rng.choice(["Ev", "Cv"])]
        pre = 0
        for e in range(E.n):
            pre |= eval_algebraic(M, E.pre_formula(e), reg)
        if pre:
            break
    f = g.dynamic_formula(rng, 3, reg, dyn_depth=1)
    U = update_model(M, E, reg)
    assert eval_algebraic(U, f, reg) == lift(M, E, f, reg, U=U)


@given(seeds)
def test_substitution_matches_classical_update(seed):
    rng = random.Random(seed)
    M, E = g.classical_pair(rng)
    _, U = classical_update(M, E)
    for k, (s, e) in enumerate(U.origin):
        for a in g.ATOMS:
            assert (k in U.valuation[a]) == (s in truth_set(M, apply_substitution(E.sub[e], Atom(a))))
