"""The art-investor example: data, probability categories and the demo report.

An investor ``i`` is unsure whether buying the work of a young artist is a
good investment (``p``). The initial model has a root state ``s0`` below
``s1`` (p) and ``s2`` (not p). Three events follow: the artist's request to
exhibit at a top gallery is accepted (``e1``), rejected (``e2``), or never
made (``e3``); the investor cannot tell ``e2`` from ``e3``.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ValidationError
from .logic.formula import BOT, TOP, Atom, Not
from .relational import AgentView, EventStructureL, IntKripkeModel, int_update

F = Fraction

CATEGORIES = (
    # (label, low, low_closed, high, high_closed)
    ("Impossible", F(0), True, F(1, 100), False),
    ("Implausible", F(1, 100), True, F(1, 10), True),
    ("Unlikely", F(1, 10), False, F(1, 2), True),
    ("Likely", F(1, 2), False, F(7, 10), True),
    ("Very likely", F(7, 10), False, F(9, 10), False),
    ("Almost certain", F(9, 10), True, F(99, 100), False),
    ("Certain", F(99, 100), True, F(1), True),
)


class OutOfRange(ValidationError):
    pass


def categorize(q) -> str:
    """Coarse probability label for ``q`` in [0, 1].

    The intervals are the investor's table; 0.99 itself is Certain, since two
    printed intervals both contain it and the closed upper one is preferred.
    """
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise OutOfRange(f"{q} is not a probability", witness=str(q))
    for label, lo, lo_closed, hi, hi_closed in CATEGORIES:
        above = q > lo or (lo_closed and q == lo)
        below = q < hi or (hi_closed and q == hi)
        if above and below:
            return label
    raise AssertionError(q)  # the table covers [0, 1]


def round_half_up(q, places: int = 3) -> str:
    """Decimal string of a nonnegative rational rounded half-up."""
    q = Fraction(q)
    scale = 10 ** places
    sign = "-" if q < 0 else ""
    n = math.floor(abs(q) * scale + Fraction(1, 2))
    whole, frac = divmod(n, scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"


def art_model() -> IntKripkeModel:
    return IntKripkeModel(
        states=("s0", "s1", "s2"),
        agents={"i": AgentView((frozenset({0, 1, 2}),), (F(3, 5), F(3, 10), F(1, 10)))},
        valuation={"p": {1}},
        order=frozenset({(0, 1), (0, 2)}),
    ).validate()


def art_event() -> EventStructureL:
    p = Atom("p")
    return EventStructureL(
        name="Art",
        events=("e1", "e2", "e3"),
        agents={"i": AgentView((frozenset({0}), frozenset({1, 2})), (F(1), F(9, 10), F(1, 10)))},
        phi=(TOP, p, Not(p)),
        # pre[e][j] for preconditions (true, p, ~p)
        pre=((F(1, 10), F(3, 10), F(1, 100)),
             (F(1, 2), F(3, 5), F(39, 100)),
             (F(2, 5), F(1, 10), F(3, 5))),
        sub=({"apply": TOP, "exhibit": TOP},
             {"apply": TOP, "exhibit": BOT},
             {"apply": BOT, "exhibit": BOT}),
        order=frozenset({(1, 0), (2, 0)}),
    ).validate()


def _labels(M: IntKripkeModel, s: int) -> list:
    return sorted(p for p, ext in M.valuation.items() if s in ext)


def demo_art(places: int = 3) -> dict:
    """Run the example and collect exact and displayed probabilities."""
    M = art_model()
    E = art_event()
    U = int_update(M, E)
    initial = [{"state": M.states[s], "exact": str(M.agents["i"].P[s]),
                "display": round_half_up(M.agents["i"].P[s], places),
                "category": categorize(M.agents["i"].P[s]), "atoms": _labels(M, s)}
               for s in range(M.n)]
    cells = []
    for c in U.agents["i"].partition:
        rows = []
        for k in sorted(c, key=lambda k: (U.origin[k][1], U.origin[k][0])):
            s, e = U.origin[k]
            q = U.agents["i"].P[k]
            rows.append({"state": M.states[s], "event": E.events[e], "exact": str(q),
                         "display": round_half_up(q, places), "category": categorize(q),
                         "atoms": _labels(U, k)})
        cells.append({"events": sorted({r["event"] for r in rows}), "points": rows})
    cells.sort(key=lambda c: c["events"])
    actual = next(c for c in cells if c["events"] == ["e1"])
    return {"initial": initial, "cells": cells, "submodel": actual["points"]}


def render_demo(report: dict) -> str:
    out = ["initial model (agent i)"]
    for r in report["initial"]:
        out.append(f"  {r['state']:<4} {r['exact']:>8}  {r['display']}  {r['category']:<14} "
                   f"{' '.join(r['atoms'])}".rstrip())
    out.append("updated model (agent i)")
    for c in report["cells"]:
        out.append(f"  cell {{{', '.join(c['events'])}}}")
        for r in c["points"]:
            pt = f"({r['event']},{r['state']})"
            out.append(f"    {pt:<9} {r['exact']:>9}  {r['display']}  {r['category']:<14} "
                       f"{' '.join(r['atoms'])}".rstrip())
    out.append("actual event e1")
    for r in report["submodel"]:
        pt = f"({r['event']},{r['state']})"
        out.append(f"  {pt:<9} {r['display']}  {r['category']}")
    return "\n".join(out)
