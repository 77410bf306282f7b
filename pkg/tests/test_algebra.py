import itertools
import random

import pytest
from hypothesis import given, strategies as st

from pdel import _pykernels, kernels
from pdel import generators as g
from pdel.algebra import (BlockEHA, FiniteLattice, TableEHA, build_lattice, check_eha_axioms,
                          eha_from_json, eha_to_json, heyting_implies, i_minimal, i_minimal_bruteforce,
                          powerset_lattice, pseudo_quotient, quotient_minimal_by_characterisation)
from pdel.errors import DegenerateQuotient, JoinMeetMissing, NotAPartialOrder, NotDistributive


def random_lattice(seed: int, points: int = 5) -> FiniteLattice:
    rng = random.Random(seed)
    lower = [0] * points
    for b in range(points):
        for a in range(b):
            if rng.random() < 0.4:
                lower[b] |= 1 << a | lower[a]
    return FiniteLattice(lower)


lattices = st.builds(random_lattice, st.integers(0, 10_000), st.integers(0, 5))


def elements_of(L, data, k=1):
    return [data.draw(st.sampled_from(L.elements)) for _ in range(k)]


# construction -------------------------------------------------------------------


def test_one_element_lattice():
    L = build_lattice(1, [])
    assert L.size == 1
    assert L.top == L.bottom == 0


def test_vee_lattice_from_pairs():
    # 0 = empty, 1 = {s1}, 2 = {s2}, 3 = {s1,s2}, 4 = everything
    L = build_lattice(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)])
    els = L.elements
    assert L.size == 5
    assert L.join(els[1], els[2]) == els[3]
    assert L.meet(els[1], els[2]) == els[0]
    assert L.implies(els[1], els[0]) == els[2]
    for a, b, c in itertools.product(els, repeat=3):
        assert a & (b | c) == (a & b) | (a & c)


def test_vee_lattice_implication(vee):
    assert vee.elements == (0, 0b010, 0b100, 0b110, 0b111)
    assert heyting_implies(vee, 0b010, 0) == 0b100
    assert vee.neg(0b110) == 0


def test_pentagon_is_not_distributive():
    # bottom 0, x=1 < z=2, y=3, top 4
    with pytest.raises(NotDistributive):
        build_lattice(5, [(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)])


def test_diamond_m3_is_not_distributive():
    with pytest.raises(NotDistributive):
        build_lattice(5, [(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)])


def test_cycle_is_not_a_partial_order():
    with pytest.raises(NotAPartialOrder) as ex:
        build_lattice(3, [(0, 1), (1, 2), (2, 0)])
    assert ex.value.witness is not None


def test_pair_out_of_range():
    with pytest.raises(NotAPartialOrder):
        build_lattice(2, [(0, 5)])


def test_missing_bounds():
    # two minimal and two maximal elements, all comparable across
    with pytest.raises(JoinMeetMissing):
        build_lattice(4, [(0, 2), (0, 3), (1, 2), (1, 3)])


def test_element_numbering_survives_roundtrip():
    L = build_lattice(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
    assert [L.index(x) for x in L.elements] == [0, 1, 2, 3]
    assert L.element(3) == L.top


# Heyting laws -------------------------------------------------------------------


@given(lattices, st.data())
def test_residuation(L, data):
    a, b, c = elements_of(L, data, 3)
    assert L.leq(L.meet(c, a), b) == L.leq(c, L.implies(a, b))


@given(lattices, st.data())
def test_implication_identities(L, data):
    (x,) = elements_of(L, data)
    assert L.implies(0, x) == L.top
    assert L.implies(L.top, x) == x
    assert L.implies(x, x) == L.top
    assert L.is_element(L.implies(x, 0))


@given(lattices, st.data())
def test_operations_stay_in_lattice(L, data):
    a, b = elements_of(L, data, 2)
    for x in (L.meet(a, b), L.join(a, b), L.implies(a, b)):
        assert L.is_element(x)


@given(st.integers(0, 4))
def test_powerset_is_boolean(k):
    L = powerset_lattice(k)
    assert L.size == 2 ** k
    assert all(x | L.neg(x) == L.top for x in L.elements)


def test_non_boolean_excluded_middle_fails(vee):
    assert 0b010 | vee.neg(0b010) != vee.top


# epistemic Heyting algebras --------------------------------------------------------


def identity_eha(L, agents=("i",)):
    return TableEHA(L, {i: {x: x for x in L.elements} for i in agents},
                    {i: {x: x for x in L.elements} for i in agents})


def test_identity_modalities_on_powerset_pass():
    A = identity_eha(powerset_lattice(2))
    assert check_eha_axioms(A) == []
    assert set(i_minimal(A, "i")) == {0b01, 0b10}


def test_collapsing_modalities_on_vee(vee):
    A = TableEHA(vee, {"i": {x: (vee.top if x else 0) for x in vee.elements}},
                 {"i": {x: (vee.top if x == vee.top else 0) for x in vee.elements}})
    assert check_eha_axioms(A) == []
    assert i_minimal(A, "i") == (vee.top,)


def test_broken_diamond_is_reported(vee):
    A = TableEHA(vee, {"i": {x: x for x in vee.elements}},
                 {"i": {x: x for x in vee.elements}})
    # identity on a non-Boolean lattice breaks the Boolean-image axiom
    assert any(v.axiom in ("E", "image-complement") for v in check_eha_axioms(A))


@given(st.integers(0, 10_000))
def test_random_block_eha_is_valid(seed):
    A = g.block_eha(random.Random(seed))
    assert check_eha_axioms(A) == []
    for i in A.agents:
        assert i_minimal(A, i) == i_minimal_bruteforce(A, i)


@given(st.integers(0, 10_000))
def test_i_minimal_elements_are_disjoint_and_cover(seed):
    A = g.block_eha(random.Random(seed))
    for i in A.agents:
        mins = i_minimal(A, i)
        assert all(a & b == 0 for a, b in itertools.combinations(mins, 2))
        assert A.lattice.join_all(mins) == A.top


def test_json_roundtrip():
    A = g.block_eha(random.Random(3))
    B = eha_from_json(eha_to_json(A))
    assert B.lattice.size == A.lattice.size
    assert eha_to_json(B) == eha_to_json(A)
    assert check_eha_axioms(B) == []


# pseudo-quotients --------------------------------------------------------------------


def test_quotient_by_top_is_identity():
    A = g.block_eha(random.Random(5))
    Q = pseudo_quotient(A, A.top)
    assert Q.lattice.elements == A.lattice.elements
    assert all(Q.project(x) == x for x in A.lattice.elements)
    for i in A.agents:
        assert all(Q.diamond(i, x) == A.diamond(i, x) for x in A.lattice.elements)
        assert all(Q.box(i, x) == A.box(i, x) for x in A.lattice.elements)


def test_quotient_of_full_relation():
    A = BlockEHA(powerset_lattice(3), {"i": (0b111,)})
    assert i_minimal(A, "i") == (0b111,)
    Q = pseudo_quotient(A, 0b011)
    assert Q.lattice.size == 4
    assert i_minimal(Q, "i") == (0b011,)
    assert check_eha_axioms(Q) == []
    # b and c with equal traces are identified
    assert Q.project(0b101) == Q.project(0b001) == 0b001


def test_degenerate_quotient():
    A = BlockEHA(powerset_lattice(2), {"i": (0b11,)})
    assert pseudo_quotient(A, 0).degenerate
    with pytest.raises(DegenerateQuotient):
        pseudo_quotient(A, 0, allow_degenerate=False)


@given(st.integers(0, 10_000))
def test_quotient_minimals_match_characterisation(seed):
    rng = random.Random(seed)
    A = g.block_eha(rng)
    a = g.random_element(rng, A.lattice)
    Q = pseudo_quotient(A, a)
    assert check_eha_axioms(Q) == []
    for i in A.agents:
        assert sorted(i_minimal_bruteforce(Q, i)) == sorted(quotient_minimal_by_characterisation(A, a, i))


# kernels ----------------------------------------------------------------------------


@pytest.mark.skipif(kernels.compiled is None, reason="compiled kernels not built")
@given(lattices)
def test_kernel_backends_agree(L):
    els = L.elements
    n = len(els)
    idx = {x: k for k, x in enumerate(els)}
    leq = bytes(1 if x & ~y == 0 else 0 for x in els for y in els)
    from pdel.algebra import _int_array
    join = _int_array([idx[x | y] for x in els for y in els])
    meet = _int_array([idx[x & y] for x in els for y in els])
    imp = _int_array([idx[L.implies(x, y)] for x in els for y in els])
    for k in (_pykernels, kernels.compiled):
        assert k.residuation_violation(n, leq, meet, imp) is None
        assert k.distributivity_violation(n, join, meet) is None
    assert bytes(_pykernels.order_closure(n, leq)) == bytes(kernels.compiled.order_closure(n, leq))
    a = _pykernels.lub_table(n, leq)
    b = kernels.compiled.lub_table(n, leq)
    assert list(a[0]) == list(b[0]) and a[1] == b[1]
    order = L.linear_extension()
    assert sorted(_pykernels.downsets(order, list(L.lower))) == sorted(kernels.compiled.downsets(order, list(L.lower)))
