import random
from fractions import Fraction as F

from hypothesis import given, strategies as st

from pdel import generators as g
from pdel.algebra import check_eha_axioms, i_minimal
from pdel.duality import check_duality, complex_algebra, upset_algebra
from pdel.logic.formula import Atom, Not
from pdel.measures import validate
from pdel.relational import AgentView, EventStructureL, PESModel

seeds = st.integers(0, 10_000)


def test_one_state_model():
    M = PESModel(("s",), {"i": AgentView((frozenset({0}),), (F(1),))}, {"p": {0}}).validate()
    C = complex_algebra(M)
    assert C.algebra.lattice.size == 2
    assert C.structure.measure("i")(1) == 1
    assert C.valuation["p"] == 1


@given(seeds)
def test_complex_algebra_is_an_ape_structure(seed):
    M = g.pes_model(random.Random(seed))
    C = complex_algebra(M)
    assert check_eha_axioms(C.algebra) == []
    for i, v in M.agents.items():
        assert validate(C.structure.measure(i), C.algebra) == []
        cells = sorted(sum(1 << s for s in c) for c in v.partition)
        assert sorted(i_minimal(C.algebra, i)) == cells


def test_upset_algebra_of_vee(art):
    M, _ = art
    U = upset_algebra(M)
    assert U.algebra.lattice.size == 5
    assert not U.algebra.is_boolean()
    assert check_eha_axioms(U.algebra) == []


def test_identity_event_both_modes():
    M = g.pes_model(random.Random(6))
    for mode in ("intermediate", "update"):
        assert check_duality(M, g.identity_event(), mode=mode)["ok"]


def test_art_example_read_classically(art):
    M, _ = art
    p = Atom("p")
    C = PESModel(M.states, M.agents, M.valuation).validate()
    E = EventStructureL("Art", ("e1", "e2", "e3"),
                        {"i": AgentView((frozenset({0}), frozenset({1, 2})), (F(1), F(9, 10), F(1, 10)))},
                        (p, Not(p)),
                        ((F(3, 10), F(1, 100)), (F(3, 5), F(39, 100)), (F(1, 10), F(3, 5))),
                        ({}, {}, {})).validate()
    for mode in ("intermediate", "update"):
        report = check_duality(C, E, mode=mode)
        assert report["ok"], report["witnesses"]
        assert report["mode"] == mode


def test_art_example_intuitionistic(art):
    M, E = art
    report = check_duality(M, E, mode="int-update")
    assert report["ok"], report["witnesses"]


@given(seeds)
def test_random_pairs(seed):
    M, E = g.classical_pair(random.Random(seed))
    for mode in ("intermediate", "update"):
        assert check_duality(M, E, mode=mode)["witnesses"] == []


@given(seeds)
def test_random_ordered_pairs(seed):
    M, E = g.int_pair(random.Random(seed))
    assert check_duality(M, E, mode="int-update")["ok"]
