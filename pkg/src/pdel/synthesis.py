"""Exact construction of i-measures realising a sign pattern of probability atoms.

For an agent ``i`` and a cell ``a`` (an i-minimal element) the unknowns are
``x_b`` for every ``b <= a``. Structural rows make ``x`` a normalised,
monotone, modular function; each probability atom contributes one row,
``Σ α x_{ψ∧a} >= β`` when it must hold on the cell and the strict negation
``< β`` when it must fail. Strict rows are relaxed to ``t + ε <= β`` with a
shared ``ε`` that is maximised (``ε <= 1``). ``strictify`` then averages
solutions that separate each covering pair, which gives a strictly monotone
solution without leaving the feasible set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import EpistemicHeytingAlgebra, i_minimal
from .errors import Infeasible, ValidationError
from .logic.formula import Formula, Prob, ProbGt, to_text
from .measures import APEModel, APEStructure, TableMeasure, counting_measure, validate
from .simplex import OPTIMAL, Problem

MAX_CELL_ELEMENTS = 64
EPS = "eps"

_FLIP = {">=": "<", ">": "<=", "<": ">=", "<=": ">"}


@dataclass(frozen=True)
class Row:
    coeffs: tuple  # ((variable, coefficient), ...)
    op: str  # one of <= >= == < >
    rhs: Fraction
    kind: str  # bound | bottom | cell | modular | monotone | atom
    note: str = ""

    @property
    def strict(self) -> bool:
        return self.op in ("<", ">")

    def lhs(self, values: Mapping) -> Fraction:
        return sum((c * values[v] for v, c in self.coeffs), Fraction(0))

    def holds(self, values: Mapping) -> bool:
        t = self.lhs(values)
        return {"<=": t <= self.rhs, ">=": t >= self.rhs, "==": t == self.rhs,
                "<": t < self.rhs, ">": t > self.rhs}[self.op]

    def describe(self, fmt=str) -> str:
        terms = " + ".join(f"{c}*x[{fmt(v)}]" for v, c in self.coeffs) or "0"
        return f"{terms} {self.op} {self.rhs}" + (f"  ({self.note})" if self.note else "")


@dataclass
class LinSystem:
    """Rows over ``x_b`` for the elements ``b`` below one cell."""

    agent: str
    cell: int
    variables: list
    rows: list = field(default_factory=list)

    def add(self, coeffs, op, rhs, kind, note=""):
        merged: dict = {}
        for v, c in coeffs:
            merged[v] = merged.get(v, Fraction(0)) + Fraction(c)
        items = tuple((v, c) for v, c in merged.items() if c)
        self.rows.append(Row(items, op, Fraction(rhs), kind, note))

    def rows_of(self, kind: str) -> list:
        return [r for r in self.rows if r.kind == kind]

    def check(self, values: Mapping) -> list:
        """Rows violated by ``values`` (substitution check)."""
        return [r for r in self.rows if not r.holds(values)]


@dataclass
class Solution:
    values: dict
    eps: Fraction | None = None


@dataclass
class SignPattern:
    """For each probability atom of ``agent``, the cells (by position) where it must hold.

    ``bits[m][k]`` is 1 if atom ``m`` holds on cell ``k``, 0 if it fails;
    cells missing from ``bits[m]`` are left unconstrained. Cell positions
    follow ``cells(A, agent)``.
    """

    agent: str
    atoms: tuple
    bits: tuple

    def __post_init__(self):
        self.atoms = tuple(self.atoms)
        self.bits = tuple({int(k): int(v) for k, v in b.items()} for b in self.bits)
        if len(self.atoms) != len(self.bits):
            raise ValidationError("one bit map per atom is required")
        for f in self.atoms:
            if not isinstance(f, Prob) or f.agent != self.agent:
                raise ValidationError(f"{to_text(f)} is not a probability atom of agent {self.agent}")

    def at(self, k: int) -> dict:
        """Atom position -> bit for cell ``k``."""
        return {m: b[k] for m, b in enumerate(self.bits) if k in b}


def cells(A: EpistemicHeytingAlgebra, i: str) -> list:
    """The agent's cells in element-index order."""
    return sorted(i_minimal(A, i), key=A.lattice.order_key)


def _interpreter(A: EpistemicHeytingAlgebra, valuation, interpret):
    if interpret is not None:
        return interpret
    from .logic.semantics import interpret as sem_interpret
    M0 = APEModel(APEStructure(A, {}), dict(valuation or {}))
    return lambda f: sem_interpret(M0, f)


def build_system(A: EpistemicHeytingAlgebra, i: str, cell: int, atoms: Sequence[Formula],
                 pattern: Mapping[int, int], valuation=None, interpret=None) -> LinSystem:
    """Structural rows plus one row per atom with a bit at this cell.

    Atom subformulas are interpreted with ``interpret`` if given, else in the
    model with the given valuation and no measures, so they may not contain
    probability atoms themselves.
    """
    if cell not in i_minimal(A, i):
        raise ValidationError(f"{cell} is not an {i}-minimal element", witness=cell)
    L = A.lattice
    xs = L.downsets_below(cell)
    if len(xs) > MAX_CELL_ELEMENTS:
        raise ValidationError(f"cell has {len(xs)} elements, more than {MAX_CELL_ELEMENTS}",
                              witness=cell)
    S = LinSystem(i, cell, list(xs))
    for b in xs:
        S.add([(b, 1)], ">=", 0, "bound")
        S.add([(b, 1)], "<=", 1, "bound")
    S.add([(0, 1)], "==", 0, "bottom")
    S.add([(cell, 1)], "==", 1, "cell")
    for n, b in enumerate(xs):
        for c in xs[n + 1:]:
            if b & ~c == 0:
                S.add([(b, 1), (c, -1)], "<=", 0, "monotone")
            elif c & ~b == 0:
                S.add([(c, 1), (b, -1)], "<=", 0, "monotone")
            else:
                S.add([(b, 1), (c, 1), (b & c, -1), (b | c, -1)], "==", 0, "modular")
    ev = _interpreter(A, valuation, interpret)
    for m, bit in sorted(pattern.items()):
        f = atoms[m]
        if not isinstance(f, Prob) or f.agent != i:
            raise ValidationError(f"{to_text(f)} is not a probability atom of agent {i}")
        op = ">" if isinstance(f, ProbGt) else ">="
        if not bit:
            op = _FLIP[op]
        coeffs = [(ev(g) & cell, c) for c, g in f.terms]
        S.add(coeffs, op, f.bound, "atom", note=f"{to_text(f)} {'holds' if bit else 'fails'}")
    return S


def _problem(S: LinSystem, rows=None):
    strict = any(r.strict for r in (rows if rows is not None else S.rows))
    P = Problem(S.variables + ([EPS] if strict else []))
    for r in (rows if rows is not None else S.rows):
        coeffs = dict(r.coeffs)
        if r.op == "<":
            coeffs[EPS] = coeffs.get(EPS, 0) + 1
            P.add(coeffs, "<=", r.rhs)
        elif r.op == ">":
            coeffs[EPS] = coeffs.get(EPS, 0) - 1
            P.add(coeffs, ">=", r.rhs)
        else:
            P.add(coeffs, r.op, r.rhs)
    if strict:
        P.add({EPS: 1}, "<=", 1)
    return P, strict


def _feasible(S: LinSystem, rows) -> bool:
    P, strict = _problem(S, rows)
    res = P.maximize({EPS: 1} if strict else {})
    return res.status == OPTIMAL and (not strict or res.objective > 0)


def _conflict(S: LinSystem) -> list:
    """A minimal set of atom rows that is infeasible with the structural rows."""
    structural = [r for r in S.rows if r.kind != "atom"]
    core = list(S.rows_of("atom"))
    for r in list(core):
        trial = [x for x in core if x is not r]
        if not _feasible(S, structural + trial):
            core = trial
    return core


def _infeasible(S: LinSystem, message: str, extra=None) -> Infeasible:
    rows = _conflict(S)
    witness = {"agent": S.agent, "cell": S.cell, "rows": [r.describe() for r in rows]}
    if extra:
        witness.update(extra)
    return Infeasible(message, witness=witness)


def solve_exact(S: LinSystem) -> Solution | Infeasible:
    """A rational solution of every row, or an ``Infeasible`` value (not raised).

    With strict rows the shared slack ``ε`` is maximised and must come out
    positive. The returned point is checked by substitution.
    """
    P, strict = _problem(S)
    res = P.maximize({EPS: 1} if strict else {})
    if res.status != OPTIMAL or (strict and res.objective <= 0):
        return _infeasible(S, f"no solution on the {S.agent}-cell {S.cell}")
    values = {b: res.values[b] for b in S.variables}
    bad = S.check(values)
    if bad:  # pragma: no cover - guarded by exact arithmetic
        raise AssertionError(f"solver returned a point violating {bad[0].describe()}")
    return Solution(values, res.values.get(EPS) if strict else None)


def covering_pairs(S: LinSystem) -> list:
    """Pairs b < c with nothing in between; strictness on these gives it everywhere."""
    xs = S.variables
    out = []
    for b in xs:
        for c in xs:
            if b != c and b & ~c == 0 and bin(c & ~b).count("1") == 1:
                out.append((b, c))
    return out


def strictify(S: LinSystem, pairs=None) -> Solution | Infeasible:
    """One solution with ``x_b < x_c`` for every pair, by averaging.

    Starts from ``solve_exact``'s point; for each pair maximises
    ``x_c - x_b`` with the slack held at half the best one, then takes the
    equal-weight average of all these points. ``pairs`` defaults to the
    covering pairs of the cell.
    """
    base = solve_exact(S)
    if isinstance(base, Infeasible):
        return base
    pairs = covering_pairs(S) if pairs is None else list(pairs)
    P, strict = _problem(S)
    R = P.reduce()
    extra = [({EPS: 1}, ">=", base.eps / 2)] if strict else []
    points = [base.values]
    for b, c in pairs:
        if base.values[b] < base.values[c]:
            continue
        res = P.maximize({c: 1, b: -1}, reduced=R, extra=extra)
        if res.status != OPTIMAL or res.objective <= 0:
            return _infeasible(S, f"the pattern forces equal measure on {b} and {c}",
                               {"pair": [b, c]})
        points.append({x: res.values[x] for x in S.variables})
    k = len(points)
    values = {x: sum((p[x] for p in points), Fraction(0)) / k for x in S.variables}
    bad = S.check(values)
    loose = [(b, c) for b, c in pairs if not values[b] < values[c]]
    if bad or loose:  # pragma: no cover - convexity guarantees neither happens
        raise AssertionError("averaged point is not a strict solution")
    return Solution(values, base.eps)


def synthesize_measures(A: EpistemicHeytingAlgebra, patterns: Mapping[str, SignPattern],
                        valuation=None, interpret=None) -> APEStructure:
    """Strict i-measures realising every pattern; raises ``Infeasible`` per cell.

    Agents without a pattern get the counting measure: every join-irreducible
    below a cell weighs the same.
    """
    measures = {}
    for i in A.agents:
        pat = patterns.get(i)
        if pat is None:
            measures[i] = counting_measure(A, i)
            continue
        values: dict = {}
        for k, cell in enumerate(cells(A, i)):
            S = build_system(A, i, cell, pat.atoms, pat.at(k), valuation, interpret)
            sol = strictify(S)
            if isinstance(sol, Infeasible):
                sol.witness["cell_index"] = k
                raise sol
            values.update(sol.values)
        measures[i] = TableMeasure(i, values)
    unknown = set(patterns) - set(A.agents)
    if unknown:
        raise ValidationError(f"patterns for unknown agents {sorted(unknown)}")
    for i, m in measures.items():
        bad = validate(m, A, strict=True)
        if bad:  # pragma: no cover - the rows encode every clause
            raise AssertionError(f"synthesized measure for {i} fails {bad[0].clause}")
    return APEStructure(A, measures)


def pattern_holds(M: APEModel, pattern: SignPattern) -> list:
    """Cells where an atom's valuation disagrees with its bit (empty when aligned)."""
    from .logic.semantics import eval_algebraic
    out = []
    cs = cells(M.algebra, pattern.agent)
    for m, f in enumerate(pattern.atoms):
        ext = eval_algebraic(M, f)
        for k, bit in pattern.bits[m].items():
            holds = cs[k] & ~ext == 0
            if holds != bool(bit):
                out.append({"atom": to_text(f), "cell": k, "expected": bit})
    return out


__all__ = ["Row", "LinSystem", "Solution", "SignPattern", "cells", "build_system", "solve_exact",
           "covering_pairs", "strictify", "synthesize_measures", "pattern_holds", "MAX_CELL_ELEMENTS"]
