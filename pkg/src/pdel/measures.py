"""Per-agent measures on epistemic Heyting algebras and APE assembly.

A measure for agent ``i`` is defined on the elements lying below some
i-minimal element (a "cell"). Within each cell it must be monotone, modular
and vanish at bottom; a strict measure is moreover strictly monotone and gives
every cell mass 1. All values are ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import EpistemicHeytingAlgebra, i_minimal, iter_bits
from .errors import MemberNotInPhi, MissingMeasure, OutOfDomain, ValidationError


class IMeasure:
    """Abstract measure; subclasses implement ``_value`` on domain elements."""

    def __init__(self, agent: str):
        self.agent = agent

    def value(self, x: int) -> Fraction:
        raise NotImplementedError

    def __call__(self, x: int) -> Fraction:
        return self.value(x)


class TableMeasure(IMeasure):
    """Measure stored as an explicit map from masks to rationals."""

    def __init__(self, agent: str, values: Mapping[int, Fraction]):
        super().__init__(agent)
        self.values = {x: Fraction(v) for x, v in values.items()}

    def value(self, x: int) -> Fraction:
        try:
            return self.values[x]
        except KeyError:
            raise OutOfDomain(f"element {x:#x} outside the domain of the {self.agent}-measure",
                              witness=x) from None


def domain(A: EpistemicHeytingAlgebra, i: str) -> list[int]:
    """Elements below some i-minimal element (bottom included once)."""
    out = {0}
    for cell in i_minimal(A, i):
        out.update(A.lattice.downsets_below(cell))
    return sorted(out)


def weight_measure(A: EpistemicHeytingAlgebra, i: str, weights: Mapping[int, Fraction]) -> TableMeasure:
    """Measure summing per-join-irreducible weights: μ(x) = Σ w_j over bits j of x."""
    values = {}
    for x in domain(A, i):
        values[x] = sum((Fraction(weights[j]) for j in iter_bits(x)), Fraction(0))
    return TableMeasure(i, values)


def counting_measure(A: EpistemicHeytingAlgebra, i: str) -> TableMeasure:
    """Each cell gives every join-irreducible below it equal weight."""
    weights = {}
    for cell in i_minimal(A, i):
        bits = list(iter_bits(cell))
        for j in bits:
            weights[j] = Fraction(1, len(bits))
    return weight_measure(A, i, weights)


@dataclass(frozen=True)
class MeasureViolation:
    clause: str
    agent: str
    witness: tuple

    def as_dict(self):
        return {"clause": self.clause, "agent": self.agent, "witness": list(self.witness)}


def validate(m: IMeasure, A: EpistemicHeytingAlgebra, strict: bool = True) -> list[MeasureViolation]:
    """Every failing clause instance; witnesses are element indices of ``A``."""
    i = m.agent
    L = A.lattice
    out: list[MeasureViolation] = []

    def ix(x):
        return L.index(x)

    def bad(clause, *xs):
        out.append(MeasureViolation(clause, i, tuple(ix(x) for x in xs)))

    if isinstance(m, TableMeasure):
        dom = set(domain(A, i))
        for x in sorted(set(m.values) - dom):
            if L.is_element(x):
                bad("domain-extra", x)
            else:
                out.append(MeasureViolation("domain-extra", i, (x,)))
        for x in sorted(dom - set(m.values)):
            bad("domain-missing", x)
        if out:
            return out
    try:
        if m.value(0) != 0:
            bad("bottom", 0)
    except OutOfDomain:
        bad("domain-missing", 0)
        return out
    for cell in i_minimal(A, i):
        below = L.downsets_below(cell)
        mu = {x: m.value(x) for x in below}
        for x in below:
            if mu[x] < 0:
                bad("nonnegative", x)
        for a, x in enumerate(below):
            for y in below[a + 1:]:
                if mu[x] + mu[y] != mu[x | y] + mu[x & y]:
                    bad("modular", x, y)
                if x & ~y == 0:
                    if mu[x] > mu[y]:
                        bad("order-preserving", x, y)
                    elif strict and mu[x] >= mu[y]:
                        bad("strict", x, y)
                elif y & ~x == 0:
                    if mu[y] > mu[x]:
                        bad("order-preserving", y, x)
                    elif strict and mu[y] >= mu[x]:
                        bad("strict", y, x)
        if strict and mu[cell] != 1:
            bad("unit", cell)
    return out


# precondition forests ------------------------------------------------------------


@dataclass(frozen=True)
class Phi:
    """Ordered multiset of algebra elements.

    ``less`` is the strict order on member positions, transitively closed; it
    includes the copy order between members with the same element.
    """

    elements: tuple[int, ...]
    less: frozenset

    def __post_init__(self):
        n = len(self.elements)
        below = {k: frozenset(j for j in range(n) if (j, k) in self.less) for k in range(n)}
        object.__setattr__(self, "_below", below)

    def __len__(self):
        return len(self.elements)

    def below(self, k: int) -> frozenset:
        return self._below[k]

    def mb(self, k: int) -> tuple[int, ...]:
        """Maximal members strictly below member ``k``."""
        if not 0 <= k < len(self.elements):
            raise MemberNotInPhi(f"no member {k}", witness=k)
        strictly = self._below[k]
        return tuple(sorted(j for j in strictly if not any((j, l) in self.less for l in strictly)))

    @classmethod
    def from_elements(cls, elements: Sequence[int]) -> "Phi":
        """Order derived from the elements: strict inclusion, and index order for copies."""
        els = tuple(elements)
        less = set()
        for j, a in enumerate(els):
            for k, b in enumerate(els):
                if j == k:
                    continue
                if a == b:
                    if j < k:
                        less.add((j, k))
                elif a & ~b == 0:
                    less.add((j, k))
        return cls(els, frozenset(less))


def transitive_closure(pairs, n: int) -> frozenset:
    rel = {(a, b) for a, b in pairs}
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


def mb(phi: Phi, k: int) -> tuple[int, ...]:
    return phi.mb(k)


def mu_upper(m: IMeasure, phi: Phi, k: int, x: int) -> Fraction:
    """μ(x∧a_k) minus the masses of x under the maximal members below a_k."""
    total = m.value(x & phi.elements[k])
    for j in phi.mb(k):
        total -= m.value(x & phi.elements[j])
    return total


# APE structures and models ----------------------------------------------------------


class APEStructure:
    def __init__(self, algebra: EpistemicHeytingAlgebra, measures: Mapping[str, IMeasure]):
        self.algebra = algebra
        self.measures = dict(measures)

    def measure(self, i: str) -> IMeasure:
        try:
            return self.measures[i]
        except KeyError:
            raise MissingMeasure(f"no measure for agent {i}", witness=i) from None


class APEModel:
    def __init__(self, structure: APEStructure, valuation: Mapping[str, int]):
        self.structure = structure
        self.valuation = dict(valuation)

    @property
    def algebra(self) -> EpistemicHeytingAlgebra:
        return self.structure.algebra

    @property
    def measures(self) -> dict:
        return self.structure.measures


def make_ape(A: EpistemicHeytingAlgebra, measures: Mapping[str, IMeasure],
             valuation: Mapping[str, int] | None = None):
    """Assemble and fully validate; raises ``ValidationError`` listing every problem."""
    problems = []
    for i in A.agents:
        if i not in measures:
            problems.append({"clause": "missing-measure", "agent": i})
            continue
        problems.extend(v.as_dict() for v in validate(measures[i], A, strict=True))
    for i in measures:
        if i not in A.agents:
            problems.append({"clause": "unknown-agent", "agent": i})
    if valuation is not None:
        for p, x in valuation.items():
            if not A.lattice.is_element(x):
                problems.append({"clause": "valuation", "atom": p})
    if problems:
        raise ValidationError(f"invalid APE structure: {len(problems)} problem(s)", witness=problems)
    F = APEStructure(A, measures)
    return F if valuation is None else APEModel(F, valuation)


def measure_from_json(A: EpistemicHeytingAlgebra, data: Mapping) -> TableMeasure:
    els = A.lattice.elements
    values = {els[int(k)]: Fraction(str(v)) for k, v in data["values"].items()}
    return TableMeasure(str(data["agent"]), values)


def measure_to_json(m: TableMeasure, A: EpistemicHeytingAlgebra) -> dict:
    return {"agent": m.agent,
            "values": {str(A.lattice.index(x)): str(v) for x, v in sorted(m.values.items())}}
