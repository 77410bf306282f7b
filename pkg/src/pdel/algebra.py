"""Finite distributive lattices, Heyting implication and epistemic Heyting algebras.

Every finite distributive lattice is the lattice of down-sets of its poset of
join-irreducible elements. We store exactly that poset: each join-irreducible
is a bit position, and a lattice element is the ``int`` bitmask of the
join-irreducibles below it. Meet and join are ``&`` and ``|``, the order is
mask inclusion, and

    a -> b  =  U \\ up(a \\ b)

where ``U`` is the universe mask and ``up`` the upward closure. A lattice may
use only part of its poset (``universe``); this is how pseudo-quotients are
represented without copying anything.

Lattices built from an explicit order (``build_lattice``) additionally keep
the caller's element numbering, available through ``index``/``element``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from . import kernels
from .errors import DegenerateQuotient, JoinMeetMissing, NotAPartialOrder, NotDistributive


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def popcount(x: int) -> int:
    return bin(x).count("1")


class FiniteLattice:
    """Down-set lattice of a finite poset, restricted to a down-closed universe."""

    def __init__(self, lower: Sequence[int], universe: int | None = None,
                 elements: Sequence[int] | None = None):
        self.lower = tuple(lower)
        self.nbits = len(self.lower)
        full = (1 << self.nbits) - 1
        self.universe = full if universe is None else universe
        down = [lw | (1 << j) for j, lw in enumerate(self.lower)]
        up = [0] * self.nbits
        for j in range(self.nbits):
            for k in iter_bits(down[j]):
                up[k] |= 1 << j
        self.down = tuple(down)
        self.up = tuple(up)
        if not self.is_downset(self.universe):
            raise ValueError("universe must be a down-set of the poset")
        self._elements = tuple(elements) if elements is not None else None
        self._explicit = elements is not None
        self._index = None
        self._tables = None

    # order and operations -------------------------------------------------

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return self.universe

    def meet(self, a: int, b: int) -> int:
        return a & b

    def join(self, a: int, b: int) -> int:
        return a | b

    def leq(self, a: int, b: int) -> bool:
        return a & ~b == 0

    def up_closure(self, x: int) -> int:
        out = 0
        up = self.up
        while x:
            low = x & -x
            out |= up[low.bit_length() - 1]
            x ^= low
        return out

    def implies(self, a: int, b: int) -> int:
        return self.universe & ~self.up_closure(a & ~b)

    def neg(self, a: int) -> int:
        return self.implies(a, 0)

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.universe
        for x in xs:
            out &= x
        return out

    def join_all(self, xs: Iterable[int]) -> int:
        out = 0
        for x in xs:
            out |= x
        return out

    def is_downset(self, x: int) -> bool:
        for j in iter_bits(x):
            if self.lower[j] & ~x:
                return False
        return True

    def is_element(self, x: int) -> bool:
        return isinstance(x, int) and x >= 0 and x & ~self.universe == 0 and self.is_downset(x)

    def join_irreducibles(self) -> list[int]:
        return [self.down[j] for j in iter_bits(self.universe)]

    def restrict(self, a: int) -> "FiniteLattice":
        """The lattice of elements below ``a`` (same bit positions)."""
        sub = FiniteLattice.__new__(FiniteLattice)
        sub.lower, sub.nbits, sub.down, sub.up = self.lower, self.nbits, self.down, self.up
        sub.universe = a
        sub._elements = None
        sub._explicit = False
        sub._index = None
        sub._tables = None
        return sub

    # element enumeration and index view ----------------------------------

    def linear_extension(self, within: int | None = None) -> list[int]:
        pts = list(iter_bits(self.universe if within is None else within))
        return sorted(pts, key=lambda j: (popcount(self.lower[j]), j))

    def downsets_below(self, a: int) -> list[int]:
        """All lattice elements below ``a``, in increasing mask order."""
        order = self.linear_extension(a)
        lower = [lw & a for lw in self.lower]
        return sorted(kernels.downsets(order, lower))

    @property
    def elements(self) -> tuple[int, ...]:
        if self._elements is None:
            self._elements = tuple(self.downsets_below(self.universe))
        return self._elements

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, x: int) -> int:
        if self._index is None:
            self._index = {e: k for k, e in enumerate(self.elements)}
        return self._index[x]

    def element(self, k: int) -> int:
        return self.elements[k]

    def order_key(self, x: int):
        """Sort key: caller's numbering for explicit lattices, else the mask."""
        return self.index(x) if self._explicit else x

    def tables(self):
        """(leq, meet, join, imp) as flat index tables, computed once."""
        if self._tables is None:
            els = self.elements
            n = len(els)
            idx = {e: k for k, e in enumerate(els)}
            leq = bytearray(n * n)
            meet = [0] * (n * n)
            join = [0] * (n * n)
            imp = [0] * (n * n)
            for a, x in enumerate(els):
                row = a * n
                for b, y in enumerate(els):
                    leq[row + b] = 1 if x & ~y == 0 else 0
                    meet[row + b] = idx[x & y]
                    join[row + b] = idx[x | y]
                    imp[row + b] = idx[self.implies(x, y)]
            self._tables = (leq, meet, join, imp)
        return self._tables

    @property
    def join_table(self) -> list[list[int]]:
        n = self.size
        j = self.tables()[2]
        return [list(j[r * n:(r + 1) * n]) for r in range(n)]

    @property
    def meet_table(self) -> list[list[int]]:
        n = self.size
        m = self.tables()[1]
        return [list(m[r * n:(r + 1) * n]) for r in range(n)]

    def __repr__(self):
        return f"FiniteLattice(nbits={self.nbits}, universe={self.universe:#x})"


def build_lattice(n: int, leq: Iterable[tuple[int, int]]) -> FiniteLattice:
    """Lattice on elements ``0..n-1`` from order pairs ``(a, b)`` meaning a <= b.

    The reflexive-transitive closure of the given pairs is taken first, so
    covering pairs suffice. Raises on cycles, missing bounds or failure of
    distributivity.
    """
    if n < 1:
        raise NotAPartialOrder("a lattice needs at least one element")
    rel = bytearray(n * n)
    for a, b in leq:
        if not (0 <= a < n and 0 <= b < n):
            raise NotAPartialOrder(f"pair ({a}, {b}) outside 0..{n - 1}", witness=(a, b))
        rel[a * n + b] = 1
    order = kernels.order_closure(n, bytes(rel))
    bad = kernels.antisymmetry_violation(n, order)
    if bad is not None:
        raise NotAPartialOrder(f"elements {bad[0]} and {bad[1]} lie below each other", witness=bad)
    join, missing = kernels.lub_table(n, order)
    if missing is not None:
        raise JoinMeetMissing(f"no least upper bound for {missing}", witness=missing)
    dual = bytearray(n * n)
    for a in range(n):
        for b in range(n):
            dual[a * n + b] = order[b * n + a]
    meet, missing = kernels.lub_table(n, bytes(dual))
    if missing is not None:
        raise JoinMeetMissing(f"no greatest lower bound for {missing}", witness=missing)
    join_a = _int_array(join)
    meet_a = _int_array(meet)
    bad = kernels.distributivity_violation(n, join_a, meet_a)
    if bad is not None:
        raise NotDistributive(f"a∧(b∨c) ≠ (a∧b)∨(a∧c) for (a,b,c) = {bad}", witness=bad)
    bot = next(a for a in range(n) if all(order[a * n + b] for b in range(n)))
    # join-irreducibles: nonbottom elements that are not the join of what lies strictly below
    jis = []
    for x in range(n):
        if x == bot:
            continue
        acc = bot
        for y in range(n):
            if y != x and order[y * n + x]:
                acc = join[acc * n + y]
        if acc != x:
            jis.append(x)
    bit = {x: k for k, x in enumerate(jis)}
    lower = [0] * len(jis)
    for x in jis:
        for y in jis:
            if y != x and order[y * n + x]:
                lower[bit[x]] |= 1 << bit[y]
    masks = []
    for x in range(n):
        m = 0
        for y in jis:
            if order[y * n + x]:
                m |= 1 << bit[y]
        masks.append(m)
    return FiniteLattice(lower, elements=masks)


def _int_array(values):
    from array import array
    return array("i", values)


def heyting_implies(L: FiniteLattice, a: int, b: int) -> int:
    return L.implies(a, b)


# epistemic Heyting algebras ---------------------------------------------------


class EpistemicHeytingAlgebra:
    """A finite lattice with a diamond/box pair per agent.

    Subclasses override ``_dia``/``_box``; the public methods memoise them.
    """

    def __init__(self, lattice: FiniteLattice, agents: Iterable[str]):
        self.lattice = lattice
        self.agents = tuple(agents)
        self._dia_cache: dict = {i: {} for i in self.agents}
        self._box_cache: dict = {i: {} for i in self.agents}
        self._min_cache: dict = {}

    def _dia(self, i: str, x: int) -> int:
        raise NotImplementedError

    def _box(self, i: str, x: int) -> int:
        raise NotImplementedError

    def diamond(self, i: str, x: int) -> int:
        cache = self._dia_cache[i]
        r = cache.get(x)
        if r is None:
            r = cache[x] = self._dia(i, x)
        return r

    def box(self, i: str, x: int) -> int:
        cache = self._box_cache[i]
        r = cache.get(x)
        if r is None:
            r = cache[x] = self._box(i, x)
        return r

    def implies(self, a: int, b: int) -> int:
        return self.lattice.implies(a, b)

    @property
    def top(self) -> int:
        return self.lattice.top

    @property
    def bottom(self) -> int:
        return 0

    def is_boolean(self) -> bool:
        L = self.lattice
        return all(L.lower[j] == 0 for j in iter_bits(L.universe))


class TableEHA(EpistemicHeytingAlgebra):
    """Modal operators given as explicit maps on masks."""

    def __init__(self, lattice: FiniteLattice, dia: Mapping[str, Mapping[int, int]],
                 box: Mapping[str, Mapping[int, int]]):
        super().__init__(lattice, dia.keys())
        self.dia_table = {i: dict(t) for i, t in dia.items()}
        self.box_table = {i: dict(t) for i, t in box.items()}

    def _dia(self, i, x):
        return self.dia_table[i][x]

    def _box(self, i, x):
        return self.box_table[i][x]

    @classmethod
    def from_index_tables(cls, lattice: FiniteLattice,
                          tables: Mapping[str, tuple[Sequence[int], Sequence[int]]]) -> "TableEHA":
        els = lattice.elements
        dia = {i: {els[k]: els[v] for k, v in enumerate(d)} for i, (d, _) in tables.items()}
        box = {i: {els[k]: els[v] for k, v in enumerate(b)} for i, (_, b) in tables.items()}
        return cls(lattice, dia, box)


class BlockEHA(EpistemicHeytingAlgebra):
    """Operators induced by a partition of the poset into unions of components.

    ``blocks[i]`` lists disjoint down-and-up-closed masks covering the
    universe; ``dia`` joins the blocks a value meets and ``box`` joins the
    blocks it contains. Every finite epistemic Heyting algebra has this form,
    which makes it the natural generator for random instances.
    """

    def __init__(self, lattice: FiniteLattice, blocks: Mapping[str, Sequence[int]]):
        super().__init__(lattice, blocks.keys())
        self.blocks = {i: tuple(bs) for i, bs in blocks.items()}

    def _dia(self, i, x):
        out = 0
        for b in self.blocks[i]:
            if b & x:
                out |= b
        return out

    def _box(self, i, x):
        out = 0
        for b in self.blocks[i]:
            if b & ~x == 0:
                out |= b
        return out


def i_minimal(A: EpistemicHeytingAlgebra, i: str) -> tuple[int, ...]:
    """The i-minimal elements, i.e. the atoms of the image of ``diamond(i)``.

    Each is the closure of some join-irreducible: if ``a`` is i-minimal and
    ``j <= a`` is join-irreducible then ``dia(j)`` is a nonbottom fixed point
    below ``a``, hence equals it. So it suffices to close the join-irreducibles
    and keep the minimal results.
    """
    cached = A._min_cache.get(i)
    if cached is not None:
        return cached
    cands = {A.diamond(i, j) for j in A.lattice.join_irreducibles()}
    cands.discard(0)
    mins = [c for c in cands if not any(d != c and d & ~c == 0 for d in cands)]
    out = tuple(sorted(mins, key=A.lattice.order_key))
    A._min_cache[i] = out
    return out


def i_minimal_bruteforce(A: EpistemicHeytingAlgebra, i: str) -> tuple[int, ...]:
    """Direct reading of the definition over all elements."""
    fixed = [x for x in A.lattice.elements if x != 0 and A.diamond(i, x) == x]
    mins = [a for a in fixed if not any(b != a and b & ~a == 0 for b in fixed)]
    return tuple(sorted(mins, key=A.lattice.order_key))


def cell_of(A: EpistemicHeytingAlgebra, i: str, x: int) -> int:
    """The i-minimal element above a nonbottom ``x`` (which is ``dia(x)``)."""
    return A.diamond(i, x)


@dataclass(frozen=True)
class Violation:
    axiom: str
    agent: str | None
    witness: tuple

    def as_dict(self):
        return {"axiom": self.axiom, "agent": self.agent, "witness": list(self.witness)}


def check_eha_axioms(A: EpistemicHeytingAlgebra) -> list[Violation]:
    """All failing instances of residuation, M1-M9, E, monotonicity and the
    Boolean-image conditions. Witnesses are element indices."""
    L = A.lattice
    els = L.elements
    n = len(els)
    idx = {e: k for k, e in enumerate(els)}
    leq, meet, join, imp = L.tables()
    out: list[Violation] = []
    bad = kernels.residuation_violation(n, leq, _int_array(meet), _int_array(imp))
    if bad is not None:
        out.append(Violation("residuation", None, bad))
    meet_a, join_a, imp_a = _int_array(meet), _int_array(join), _int_array(imp)
    bot, top = idx[0], idx[L.top]
    for i in A.agents:
        dia = _int_array(idx[A.diamond(i, x)] for x in els)
        box = _int_array(idx[A.box(i, x)] for x in els)
        for code, a, b in kernels.eha_violations(n, leq, meet_a, join_a, imp_a, dia, box, bot, top):
            out.append(Violation(code, i, (a,) if b < 0 else (a, b)))
        image = sorted({A.diamond(i, x) for x in els})
        boximage = sorted({A.box(i, x) for x in els})
        if image != boximage:
            out.append(Violation("dia-image=box-image", i, ()))
        image_set = set(image)
        for x in image:
            if L.neg(x) not in image_set or (x | L.neg(x)) != L.top:
                out.append(Violation("image-complement", i, (idx[x],)))
            for y in image:
                for name, v in (("meet", x & y), ("join", x | y), ("implies", L.implies(x, y))):
                    if v not in image_set:
                        out.append(Violation(f"image-closed-{name}", i, (idx[x], idx[y])))
    return out


# pseudo-quotients ---------------------------------------------------------------


class QuotientAlgebra(EpistemicHeytingAlgebra):
    """Quotient of ``base`` by b ~ c iff b∧a = c∧a, with representatives b∧a.

    The carrier is the down-set of the divisor, so the representative of a
    class is the mask itself and ``section`` is the identity on masks.
    """

    def __init__(self, base: EpistemicHeytingAlgebra, divisor: int):
        super().__init__(base.lattice.restrict(divisor), base.agents)
        self.base = base
        self.divisor = divisor
        self.degenerate = divisor == 0

    def project(self, b: int) -> int:
        return b & self.divisor

    def section(self, x: int) -> int:
        return x

    def _dia(self, i, x):
        return self.base.diamond(i, x & self.divisor) & self.divisor

    def _box(self, i, x):
        return self.base.box(i, self.base.implies(self.divisor, x)) & self.divisor


def pseudo_quotient(A: EpistemicHeytingAlgebra, a: int, allow_degenerate: bool = True) -> QuotientAlgebra:
    """Quotient by ``a``; a bottom divisor gives the flagged one-point algebra."""
    if a == 0 and not allow_degenerate:
        raise DegenerateQuotient("quotient by the bottom element collapses everything")
    return QuotientAlgebra(A, a)


def quotient_minimal_by_characterisation(A: EpistemicHeytingAlgebra, a: int, i: str) -> tuple[int, ...]:
    """Representatives b∧a of i-minimal b of the base with b∧a nonbottom."""
    return tuple(sorted({b & a for b in i_minimal(A, i) if b & a}))


def powerset_lattice(k: int) -> FiniteLattice:
    """Boolean lattice on ``k`` atoms (discrete poset)."""
    return FiniteLattice([0] * k)


def eha_from_json(data: Mapping) -> EpistemicHeytingAlgebra:
    n = int(data["n"])
    L = build_lattice(n, [tuple(p) for p in data.get("leq", [])])
    tables = {str(i): (list(v["diamond"]), list(v["box"])) for i, v in data.get("agents", {}).items()}
    for i, (d, b) in tables.items():
        if len(d) != n or len(b) != n:
            from .errors import InputError
            raise InputError(f"agent {i}: diamond/box tables must have {n} entries")
    return TableEHA.from_index_tables(L, tables)


def eha_to_json(A: EpistemicHeytingAlgebra) -> dict:
    L = A.lattice
    els = L.elements
    idx = {e: k for k, e in enumerate(els)}
    pairs = []
    for a, x in enumerate(els):
        for b, y in enumerate(els):
            if a != b and x & ~y == 0:
                covered = not any(z not in (x, y) and x & ~z == 0 and z & ~y == 0 for z in els)
                if covered:
                    pairs.append([a, b])
    return {
        "n": len(els),
        "leq": pairs,
        "agents": {i: {"diamond": [idx[A.diamond(i, x)] for x in els],
                       "box": [idx[A.box(i, x)] for x in els]} for i in A.agents},
    }

