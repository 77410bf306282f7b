import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pdel import generators as g
from pdel.errors import AmbiguousPrecondition, EmptyUpdate, NotAForest, UnsupportedConnective, ValidationError
from pdel.logic.formula import BOT, TOP, And, Atom, DynDia, Imp, Not, Or, Box, prob
from pdel.relational import (AgentView, EventStructureL, IntKripkeModel, PESModel, classical_update,
                             discrete_copy, eval_classical, eval_int_static, int_coproduct_weights,
                             int_truth_set, int_update, intermediate_structure, model_measure,
                             pre_given_state, truth_set)

p, q = Atom("p"), Atom("q")
seeds = st.integers(0, 10_000)


def two_state_model():
    return PESModel(("u", "v"), {"i": AgentView((frozenset({0, 1}),), (F(1, 4), F(3, 4)))},
                    {"p": {0}}).validate()


def announce_p(agent="i"):
    # states where no precondition holds get pre 0 and drop out
    return EventStructureL("Ann", ("e",), {agent: AgentView((frozenset({0}),), (F(1),))},
                           (p,), ((F(1),),), ({},)).validate()


def test_model_validation():
    bad = PESModel(("u",), {"i": AgentView((frozenset({0}),), (F(1, 2),))}, {})
    with pytest.raises(ValidationError):
        bad.validate()


def test_order_must_be_persistent():
    M = IntKripkeModel(("a", "b"), {"i": AgentView((frozenset({0, 1}),), (F(1, 2), F(1, 2)))},
                       {"p": {0}}, order=frozenset({(0, 1)}))
    assert any("up-set" in x for x in M.problems())


# preconditions ---------------------------------------------------------------


def test_pre_given_state():
    M = two_state_model()
    E = EventStructureL("X", ("e1", "e2"),
                        {"i": AgentView((frozenset({0, 1}),), (F(1, 2), F(1, 2)))},
                        (p, Not(p)), ((F(3, 10), F(1)), (F(7, 10), F(0))), ({}, {})).validate()
    assert pre_given_state(M, E, 0, 0) == F(3, 10)
    assert pre_given_state(M, E, 1, 1) == 0


def test_no_precondition_holds():
    M = two_state_model()
    E = EventStructureL("X", ("e",), {"i": AgentView((frozenset({0}),), (F(1),))},
                        (p,), ((F(1),),), ({},)).validate()
    assert pre_given_state(M, E, 0, 1) == 0


def test_ambiguous_precondition():
    M = two_state_model()
    E = EventStructureL("X", ("e",), {"i": AgentView((frozenset({0}),), (F(1),))},
                        (p, TOP), ((F(1), F(1)),), ({},)).validate()
    with pytest.raises(AmbiguousPrecondition):
        pre_given_state(M, E, 0, 0)


# classical update ------------------------------------------------------------


def test_identity_update_is_isomorphic():
    M = g.pes_model(random.Random(4))
    _, U = classical_update(M, g.identity_event())
    assert U.origin == tuple((s, 0) for s in range(M.n))
    for i in M.agents:
        assert U.agents[i] == M.agents[i]
    assert U.valuation == M.valuation


def test_public_announcement_restricts():
    M = PESModel(("u", "v", "w"), {"i": AgentView((frozenset({0, 1, 2}),), (F(1, 2), F(1, 3), F(1, 6)))},
                 {"p": {0, 2}, "q": {1, 2}}).validate()
    _, U = classical_update(M, announce_p())
    assert [s for s, _ in U.origin] == [0, 2]
    assert U.agents["i"].P == (F(3, 4), F(1, 4))
    assert U.valuation["q"] == frozenset({1})


def test_empty_update():
    M = PESModel(("u",), {"i": AgentView((frozenset({0}),), (F(1),))}, {"p": set()}).validate()
    with pytest.raises(EmptyUpdate):
        classical_update(M, announce_p())


@given(seeds)
def test_intermediate_weights_match_product(seed):
    M, E = g.classical_pair(random.Random(seed))
    inter = intermediate_structure(M, E)
    for i in M.agents:
        for k, (s, e) in enumerate(inter.pairs):
            want = M.agents[i].P[s] * E.agents[i].P[e] * pre_given_state(M, E, e, s)
            assert inter.weights[i][k] == want


@given(seeds)
def test_updated_models_are_valid(seed):
    M, E = g.classical_pair(random.Random(seed))
    _, U = classical_update(M, E)
    U.validate()
    # substituted valuation, read pointwise
    for p_name, ext in U.valuation.items():
        for k, (s, e) in enumerate(U.origin):
            f = E.sub[e].get(p_name, Atom(p_name))
            assert (k in ext) == (s in truth_set(M, f))


# measures and truth ------------------------------------------------------------


def test_model_measure(art):
    M, _ = art
    assert model_measure(M, "i", 0, TOP) == 1
    assert model_measure(M, "i", 0, p) == F(3, 10)
    assert eval_classical(M, 0, prob("i", [(1, p)], F(3, 10)))
    assert not eval_classical(M, 0, prob("i", [(1, p)], F(3, 10), strict=True))
    assert eval_classical(M, 1, TOP) and not eval_classical(M, 1, BOT)


@given(seeds, st.data())
def test_model_measure_is_modular(seed, data):
    rng = random.Random(seed)
    M = g.pes_model(rng)
    f = g.static_formula(rng, 2)
    h = g.static_formula(rng, 2)
    s = data.draw(st.integers(0, M.n - 1))
    for i in M.agents:
        assert model_measure(M, i, s, f) + model_measure(M, i, s, h) == \
            model_measure(M, i, s, Or(f, h)) + model_measure(M, i, s, And(f, h))


@given(seeds)
def test_dynamic_clause(seed):
    rng = random.Random(seed)
    M, E = g.classical_pair(rng)
    reg = {E.name: E}
    f = g.static_formula(rng, 2)
    _, U = classical_update(M, E)
    for e, eid in enumerate(E.events):
        got = truth_set(M, DynDia(E.name, eid, f), reg)
        want = {s for k, (s, ee) in enumerate(U.origin) if ee == e and eval_classical(U, k, f)}
        assert got == want


# intuitionistic models ----------------------------------------------------------


def test_vee_truth(art):
    M, _ = art
    assert eval_int_static(M, 1, p)
    assert not eval_int_static(M, 0, p)
    assert not eval_int_static(M, 0, Not(p))
    assert not eval_int_static(M, 0, Or(p, Not(p)))
    assert eval_int_static(M, 0, Not(Not(Or(p, Not(p)))))


def test_modalities_are_unsupported(art):
    M, _ = art
    with pytest.raises(UnsupportedConnective):
        eval_int_static(M, 0, Box("i", p))


def _formulas(depth):
    level = [p, TOP, BOT]
    for _ in range(depth):
        level = level + [c(a, b) for c in (And, Or, Imp) for a, b in itertools.product(level, repeat=2)]
    return level


def test_implication_clause_exhaustive(art):
    M, _ = art
    for a, b in itertools.product(_formulas(1), repeat=2):
        for s in range(M.n):
            want = all(not eval_int_static(M, t, a) or eval_int_static(M, t, b) for t in M.up(s))
            assert eval_int_static(M, s, Imp(a, b)) == want


@given(seeds)
def test_persistence(seed):
    rng = random.Random(seed)
    M = g.int_model(rng)
    f = g.static_formula(rng, 3, modal=False)
    ext = int_truth_set(M, f)
    assert all(M.up(s) <= ext for s in ext)


# coproduct weights and the intuitionistic update -----------------------------------------


def test_art_weights(art):
    M, E = art
    w = {(s, e): int_coproduct_weights(M, E, s, e, "i") for s in range(3) for e in range(3)}
    assert w[(0, 0)] == F(6, 100)
    assert w[(1, 0)] == F(9, 100)
    assert w[(2, 0)] == F(1, 1000)


def test_art_update(art):
    M, E = art
    U = int_update(M, E)
    P = {U.origin[k]: U.agents["i"].P[k] for k in range(U.n)}
    assert (P[(1, 0)], P[(0, 0)], P[(2, 0)]) == (F(90, 151), F(60, 151), F(1, 151))
    for c in U.agents["i"].partition:
        assert sum(U.agents["i"].P[k] for k in c) == 1
    U.validate()
    for p_name, ext in U.valuation.items():
        assert all(U.up(k) <= ext for k in ext)


def test_identity_int_update(art):
    M, _ = art
    Id = g.identity_event(agents=("i",))
    assert [int_coproduct_weights(M, Id, s, 0, "i") for s in range(3)] == list(M.agents["i"].P)
    U = int_update(M, Id)
    assert U.agents["i"].P == M.agents["i"].P
    assert U.order == M.order


def test_not_a_forest(art):
    M, _ = art
    E = EventStructureL("X", ("e",), {"i": AgentView((frozenset({0}),), (F(1),))},
                        (p, TOP), ((F(1), F(1)),), ({},)).validate()  # no declared order
    with pytest.raises(NotAForest):
        int_update(M, E)


@given(seeds)
def test_discrete_order_collapses_to_classical(seed):
    M, E = g.classical_pair(random.Random(seed), modal=False)
    inter = intermediate_structure(M, E)
    D = discrete_copy(M)
    for i in M.agents:
        for k, (s, e) in enumerate(inter.pairs):
            assert int_coproduct_weights(D, E, s, e, i) == inter.weights[i][k]


@given(seeds)
def test_int_update_cells_normalise(seed):
    M, E = g.int_pair(random.Random(seed))
    U = int_update(M, E)
    U.validate()
