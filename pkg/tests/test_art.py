from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from pdel.art import CATEGORIES, OutOfRange, categorize, demo_art, render_demo, round_half_up

LABELS = [c[0] for c in CATEGORIES]


@pytest.mark.parametrize("q, label", [
    (0, "Impossible"), (F(1, 151), "Impossible"), (F(1, 100), "Implausible"), (F(1, 10), "Implausible"),
    (F(101, 1000), "Unlikely"), (F(1, 2), "Unlikely"), (F(90, 151), "Likely"), (F(7, 10), "Likely"),
    (F(71, 100), "Very likely"), (F(9, 10), "Almost certain"), (F(98, 100), "Almost certain"),
    (F(99, 100), "Certain"), (1, "Certain"),
])
def test_boundaries(q, label):
    assert categorize(q) == label


@pytest.mark.parametrize("q", [F(-1, 100), F(101, 100)])
def test_out_of_range(q):
    with pytest.raises(OutOfRange):
        categorize(q)


@given(st.fractions(min_value=0, max_value=1))
def test_labels_partition_the_unit_interval(q):
    hits = [label for label, lo, lc, hi, hc in CATEGORIES
            if (q > lo or (lc and q == lo)) and (q < hi or (hc and q == hi))]
    assert len(hits) == 1
    assert categorize(q) == hits[0]


@given(st.fractions(min_value=0, max_value=1), st.fractions(min_value=0, max_value=1))
def test_labels_are_monotone(a, b):
    if a <= b:
        assert LABELS.index(categorize(a)) <= LABELS.index(categorize(b))


@pytest.mark.parametrize("q, text", [
    (F(1, 151), "0.007"), (F(90, 151), "0.596"), (F(1, 2000), "0.001"), (F(1, 4), "0.250"), (0, "0.000"),
])
def test_round_half_up(q, text):
    assert round_half_up(q) == text


def test_demo_is_deterministic():
    assert demo_art() == demo_art()
    text = render_demo(demo_art())
    assert "actual event e1" in text
    assert "90/151" in text


def test_demo_labels():
    r = demo_art()
    assert [x["category"] for x in r["initial"]] == ["Likely", "Unlikely", "Implausible"]
    e1 = {x["state"]: x["category"] for x in r["submodel"]}
    assert e1 == {"s1": "Likely", "s0": "Unlikely", "s2": "Impossible"}
