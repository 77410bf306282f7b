import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pdel import generators as g
from pdel.algebra import BlockEHA, i_minimal, powerset_lattice
from pdel.duality import complex_algebra, upset_algebra
from pdel.errors import MemberNotInPhi, OutOfDomain, ValidationError
from pdel.measures import (Phi, TableMeasure, counting_measure, domain, make_ape, mb, mu_upper, validate,
                           weight_measure)
from pdel.synthesis import synthesize_measures

seeds = st.integers(0, 10_000)


def uniform3():
    A = BlockEHA(powerset_lattice(3), {"i": (0b111,)})
    return A, weight_measure(A, "i", {0: F(1, 3), 1: F(1, 3), 2: F(1, 3)})


def test_uniform_counting_measure_is_strict():
    A, m = uniform3()
    assert validate(m, A, strict=True) == []
    assert m(0b101) == F(2, 3)
    assert counting_measure(A, "i").values == m.values


def test_flat_step_breaks_strictness():
    A = BlockEHA(powerset_lattice(2), {"i": (0b11,)})
    m = TableMeasure("i", {0: 0, 0b01: 0, 0b10: 1, 0b11: 1})
    clauses = {v.clause for v in validate(m, A, strict=True)}
    assert "strict" in clauses
    assert validate(m, A, strict=False) == []


def test_all_violations_are_reported():
    A = BlockEHA(powerset_lattice(2), {"i": (0b11,)})
    m = TableMeasure("i", {0: F(1, 5), 0b01: F(1, 2), 0b10: F(1, 2), 0b11: F(1, 2)})
    clauses = {v.clause for v in validate(m, A, strict=True)}
    assert {"bottom", "modular", "strict", "unit"} <= clauses


def test_missing_domain_element():
    A = BlockEHA(powerset_lattice(1), {"i": (0b1,)})
    m = TableMeasure("i", {0b1: 1})
    assert [v.clause for v in validate(m, A)] == ["domain-missing"]


def test_out_of_domain_lookup():
    A, m = uniform3()
    with pytest.raises(OutOfDomain):
        TableMeasure("i", {0: 0})(0b1)


@given(seeds)
def test_complex_algebra_measures_are_strict(seed):
    M = g.pes_model(random.Random(seed))
    C = complex_algebra(M)
    for i in C.algebra.agents:
        assert validate(C.structure.measure(i), C.algebra, strict=True) == []


# mb and the upper measures -------------------------------------------------------


def test_mb_of_vee_preconditions():
    top, p, notp = 0b111, 0b010, 0b100
    phi = Phi((top, p, notp), frozenset({(1, 0), (2, 0)}))
    assert mb(phi, 0) == (1, 2)
    assert mb(phi, 1) == ()
    assert mb(phi, 2) == ()


def test_mb_of_partition_is_empty():
    phi = Phi.from_elements((0b001, 0b010, 0b100))
    assert all(mb(phi, k) == () for k in range(3))


def test_mb_of_copies():
    phi = Phi.from_elements((0b11, 0b11))
    assert mb(phi, 1) == (0,)
    assert mb(phi, 0) == ()


def test_mb_skips_non_maximal():
    phi = Phi.from_elements((0b001, 0b011, 0b111))
    assert mb(phi, 2) == (1,)


def test_mb_unknown_member():
    with pytest.raises(MemberNotInPhi):
        mb(Phi.from_elements((1,)), 3)


def test_upper_measure_on_the_vee_model(art):
    M, _ = art
    C = upset_algebra(M)
    m = C.structure.measure("i")
    top = C.algebra.top
    phi = Phi((top, 0b010, 0b100), frozenset({(1, 0), (2, 0)}))
    assert m(0b010) == F(3, 10)
    assert mu_upper(m, phi, 0, top) == F(3, 5)
    assert mu_upper(m, phi, 1, top) == F(3, 10)
    assert all(mu_upper(m, phi, k, 0) == 0 for k in range(3))


def test_upper_measure_without_mb_is_restriction():
    A, m = uniform3()
    phi = Phi.from_elements((0b001, 0b110))
    for x in domain(A, "i"):
        assert mu_upper(m, phi, 1, x) == m(x & 0b110)


def _random_phi(rng, A):
    """A chain and a disjoint member, all below the top."""
    L = A.lattice
    a = g.random_element(rng, L)
    b = a & g.random_element(rng, L)
    c = L.top & ~a if L.is_element(L.top & ~a) else 0
    return Phi.from_elements((a, b, c))


@given(seeds)
def test_upper_measure_is_premeasure_and_local(seed):
    rng = random.Random(seed)
    M = g.ape_model(rng)
    A = M.algebra
    phi = _random_phi(rng, A)
    for i in A.agents:
        m = M.structure.measure(i)
        dom = domain(A, i)
        for k, a in enumerate(phi.elements):
            up = TableMeasure(i, {x: mu_upper(m, phi, k, x) for x in dom})
            assert [v for v in validate(up, A, strict=False) if v.clause != "nonnegative"] == []
            for x in dom:
                for y in A.lattice.elements:
                    if a & ~y == 0 and x & y in up.values:
                        assert up(x) == up(x & y)


# assembly -----------------------------------------------------------------------------


def test_make_ape_from_complex_algebra(art):
    M = g.pes_model(random.Random(1))
    C = complex_algebra(M)
    out = make_ape(C.algebra, C.measures, C.valuation)
    assert out.valuation == C.valuation


def test_make_ape_missing_measure():
    A, m = uniform3()
    A2 = BlockEHA(A.lattice, {"i": (0b111,), "j": (0b001, 0b110)})
    with pytest.raises(ValidationError) as ex:
        make_ape(A2, {"i": m})
    assert ex.value.witness[0]["clause"] == "missing-measure"


def test_make_ape_rejects_non_strict():
    A = BlockEHA(powerset_lattice(2), {"i": (0b11,)})
    with pytest.raises(ValidationError):
        make_ape(A, {"i": TableMeasure("i", {0: 0, 1: 0, 2: 1, 3: 1})})


@given(seeds)
def test_synthesized_counting_measures_assemble(seed):
    A = g.block_eha(random.Random(seed))
    S = synthesize_measures(A, {})
    make_ape(A, S.measures)
    for i in A.agents:
        assert all(S.measure(i)(c) == 1 for c in i_minimal(A, i))
