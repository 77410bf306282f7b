"""Algebraic product update.

Pipeline: interpret an event structure over an APE model, form the power of
the algebra indexed by events, then quotient by the map sending each event to
the join of its admissible preconditions.

Product elements are single bitmasks: the block of event ``e`` occupies bits
``e*m .. e*m+m-1`` where ``m`` is the number of poset points of the base.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .algebra import EpistemicHeytingAlgebra, FiniteLattice, QuotientAlgebra, i_minimal
from .errors import DegenerateQuotient, ForestViolation, OutOfDomain, ValidationError
from .measures import APEModel, APEStructure, IMeasure, Phi, mu_upper
from .relational import AgentView, EventStructureL


class EventStructureA:
    """Event structure whose preconditions are algebra elements."""

    def __init__(self, events, agents: Mapping[str, AgentView], phi: Phi, pre, name: str = ""):
        self.events = tuple(events)
        self.agents = dict(agents)
        self.phi = phi
        self.pre = tuple(tuple(Fraction(x) for x in row) for row in pre)
        self.name = name

    @property
    def n(self) -> int:
        return len(self.events)

    def cell(self, i: str, e: int) -> frozenset:
        return self.agents[i].cell_of(e)

    def problems(self, A: EpistemicHeytingAlgebra) -> list:
        out = []
        els = self.phi.elements
        m = len(els)
        for a in range(m):
            for b in range(a + 1, m):
                x, y = els[a], els[b]
                if x != y and x & y and x & ~y and y & ~x:
                    out.append(f"members {a} and {b} overlap without being comparable")
        for a, b in self.phi.less:
            if els[a] & ~els[b]:
                out.append(f"member {a} is ordered below {b} but is not below it in the algebra")
        for j in range(m):
            col = [self.pre[e][j] for e in range(self.n)]
            if any(x < 0 for x in col) or sum(col) != 1:
                out.append(f"pre(.|{j}) is not a distribution")
        for e in range(self.n):
            for a, b in self.phi.less:
                if self.pre[e][a] == 0 and self.pre[e][b] != 0:
                    out.append(f"pre({e}|{a}) = 0 but pre({e}|{b}) > 0")
        for j, x in enumerate(els):
            if not A.lattice.is_element(x):
                out.append(f"member {j} is not an element")
        return out

    def validate(self, A: EpistemicHeytingAlgebra) -> "EventStructureA":
        probs = self.problems(A)
        if probs:
            raise ValidationError("invalid algebraic event structure: " + "; ".join(probs), witness=probs)
        return self


class ProductAlgebra(EpistemicHeytingAlgebra):
    """Power of ``base`` indexed by events, with modalities that look across
    each agent's event classes."""

    def __init__(self, base: EpistemicHeytingAlgebra, E: EventStructureA):
        bl = base.lattice
        m = bl.nbits
        lower = [bl.lower[j] << (e * m) for e in range(E.n) for j in range(m)]
        universe = 0
        for e in range(E.n):
            universe |= bl.universe << (e * m)
        super().__init__(FiniteLattice(lower, universe), base.agents)
        self.base = base
        self.events = E
        self.k = E.n
        self.m = m
        self.block_mask = (1 << m) - 1
        self.classes = {i: tuple(tuple(sorted(c)) for c in E.agents[i].partition) for i in base.agents}

    def block(self, f: int, e: int) -> int:
        return (f >> (e * self.m)) & self.block_mask

    def blocks(self, f: int) -> list:
        return [self.block(f, e) for e in range(self.k)]

    def assemble(self, blocks) -> int:
        out = 0
        for e, b in enumerate(blocks):
            out |= b << (e * self.m)
        return out

    def constant(self, a: int) -> int:
        return self.assemble([a] * self.k)

    def cell_map(self, i: str, e: int, a: int) -> int:
        """The map equal to ``a`` on the i-class of ``e`` and bottom elsewhere."""
        out = 0
        for e2 in self.events.cell(i, e):
            out |= a << (e2 * self.m)
        return out

    def _dia(self, i, f):
        out = 0
        for cls in self.classes[i]:
            v = 0
            for e in cls:
                v |= self.base.diamond(i, self.block(f, e))
            for e in cls:
                out |= v << (e * self.m)
        return out

    def _box(self, i, f):
        out = 0
        top = self.base.top
        for cls in self.classes[i]:
            v = top
            for e in cls:
                v &= self.base.box(i, self.block(f, e))
            for e in cls:
                out |= v << (e * self.m)
        return out


def intermediate_algebra(A: EpistemicHeytingAlgebra, E: EventStructureA) -> ProductAlgebra:
    return ProductAlgebra(A, E)


def product_minimal_by_characterisation(P: ProductAlgebra, i: str) -> tuple:
    """The maps equal to an i-minimal base element on one event class."""
    out = set()
    for cls in P.classes[i]:
        for a in i_minimal(P.base, i):
            out.add(P.cell_map(i, cls[0], a))
    return tuple(sorted(out))


def pre_bar_blocks(E: EventStructureA) -> list:
    out = []
    for e in range(E.n):
        v = 0
        for j, x in enumerate(E.phi.elements):
            if E.pre[e][j] != 0:
                v |= x
        out.append(v)
    return out


def pre_bar(P: ProductAlgebra) -> int:
    return P.assemble(pre_bar_blocks(P.events))


def _product_domain_cell(P: ProductAlgebra, i: str, f: int):
    """The product cell above ``f``, or None when ``f`` is outside the domain."""
    if f == 0:
        return 0
    cell = P.diamond(i, f)
    return cell if cell in set(product_minimal_by_characterisation(P, i)) else None


def mu_prime(F: APEStructure, E: EventStructureA, i: str, f: int, P: ProductAlgebra | None = None) -> Fraction:
    """Σ over events e and members a of P_i(e)·μ^a_i(f(e))·pre(e|a)."""
    P = P or ProductAlgebra(F.algebra, E)
    if _product_domain_cell(P, i, f) is None:
        raise OutOfDomain(f"{f:#x} is not below a single product cell", witness=f)
    return _mu_prime(F.measure(i), E, P, i, f)


def _mu_prime(mu: IMeasure, E: EventStructureA, P: ProductAlgebra, i: str, f: int) -> Fraction:
    total = Fraction(0)
    Pi = E.agents[i].P
    for e in range(E.n):
        x = P.block(f, e)
        if x == 0:
            continue
        for j in range(len(E.phi)):
            w = E.pre[e][j]
            if w:
                total += Pi[e] * mu_upper(mu, E.phi, j, x) * w
    return total


class PrimeMeasure(IMeasure):
    """μ' on the product algebra (a premeasure: zero masses are allowed)."""

    def __init__(self, F: APEStructure, E: EventStructureA, P: ProductAlgebra, i: str):
        super().__init__(i)
        self.F, self.E, self.P = F, E, P
        self.base = F.measure(i)
        self.cache: dict = {}

    def value(self, f: int) -> Fraction:
        r = self.cache.get(f)
        if r is None:
            if _product_domain_cell(self.P, self.agent, f) is None:
                raise OutOfDomain(f"{f:#x} is not below a single product cell", witness=f)
            r = self.cache[f] = _mu_prime(self.base, self.E, self.P, self.agent, f)
        return r


class UpdatedMeasure(IMeasure):
    """Measure on the quotient: μ'(g) divided by μ' of the cell above g."""

    def __init__(self, prime: PrimeMeasure, Q: QuotientAlgebra):
        super().__init__(prime.agent)
        self.prime = prime
        self.Q = Q
        self.cache: dict = {}
        self._cells = None

    def value(self, x: int) -> Fraction:
        r = self.cache.get(x)
        if r is not None:
            return r
        if x == 0:
            r = Fraction(0)
        else:
            if self._cells is None:
                self._cells = set(i_minimal(self.Q, self.agent))
            cell = self.Q.diamond(self.agent, x)
            if cell not in self._cells or x & ~self.Q.divisor:
                raise OutOfDomain(f"{x:#x} is not below a single cell of the updated algebra", witness=x)
            num = _mu_prime(self.prime.base, self.prime.E, self.prime.P, self.agent, x)
            den = _mu_prime(self.prime.base, self.prime.E, self.prime.P, self.agent, cell)
            if den == 0:
                raise ValidationError("cell of the updated algebra has zero mass", witness=cell)
            r = num / den
        self.cache[x] = r
        return r


class UpdatedStructure(APEStructure):
    def __init__(self, algebra: QuotientAlgebra, measures, product: ProductAlgebra,
                 events: EventStructureA, prebar: int):
        super().__init__(algebra, measures)
        self.product = product
        self.event_structure = events
        self.prebar = prebar


def update_structure(F: APEStructure, E: EventStructureA) -> UpdatedStructure:
    P = ProductAlgebra(F.algebra, E)
    pb = pre_bar(P)
    if pb == 0:
        raise DegenerateQuotient("no event has an admissible nonbottom precondition")
    Q = QuotientAlgebra(P, pb)
    measures = {i: UpdatedMeasure(PrimeMeasure(F, E, P, i), Q) for i in F.algebra.agents}
    return UpdatedStructure(Q, measures, P, E, pb)


# language-level interface ------------------------------------------------------------------


class UpdatedModel(APEModel):
    def __init__(self, structure: UpdatedStructure, valuation, source: APEModel, event: EventStructureL):
        super().__init__(structure, valuation)
        self.source = source
        self.event = event

    @property
    def product(self) -> ProductAlgebra:
        return self.structure.product

    @property
    def prebar(self) -> int:
        return self.structure.prebar

    def slice(self, x: int, e: int) -> int:
        """The event-``e`` block of a representative."""
        return self.product.block(x, e)


def translate_event(E: EventStructureL, M: APEModel, interpret=None, events=None,
                    semantic: bool = False) -> EventStructureA:
    """Interpret the preconditions in ``M`` and transport the order and pre table.

    By default the declared order is used: it must be sound on ``M``
    (declared entailments hold) and undeclared pairs must be disjoint,
    otherwise ``ForestViolation``. Co-extensional members ordered by the
    declaration become copies.

    With ``semantic=True`` the order is read off the interpretations instead
    (inclusion, with index order between equal elements), so co-extensional
    preconditions become copies whether or not they were declared.
    """
    if interpret is None:
        from .logic.semantics import eval_algebraic

        def interpret(f):
            return eval_algebraic(M, f, events)
    E.validate()
    if set(E.agents) != set(M.algebra.agents):
        raise ValidationError(f"event structure {E.name} and model disagree on agents")
    els = tuple(interpret(phi) for phi in E.phi)
    if semantic:
        EA = EventStructureA(E.events, E.agents, Phi.from_elements(els), E.pre, name=E.name)
        EA.validate(M.algebra)
        return EA
    for j in range(len(els)):
        for k in range(len(els)):
            if j == k:
                continue
            if (j, k) in E.order:
                if els[j] & ~els[k]:
                    raise ForestViolation(
                        f"declared {E.phi[j]} below {E.phi[k]} but the interpretation is not below",
                        witness=(j, k))
            elif (k, j) not in E.order and j < k and els[j] & els[k]:
                raise ForestViolation(
                    f"{E.phi[j]} and {E.phi[k]} are neither disjoint nor declared comparable",
                    witness=(j, k))
    EA = EventStructureA(E.events, E.agents, Phi(els, E.order), E.pre, name=E.name)
    EA.validate(M.algebra)
    return EA


def update_model(M: APEModel, E: EventStructureL, events=None, interpret=None) -> UpdatedModel:
    """Updated model; atoms are re-valued event-wise through the substitutions."""
    if interpret is None:
        from .logic.semantics import eval_algebraic

        def interpret(f):
            return eval_algebraic(M, f, events)
    EA = translate_event(E, M, interpret=interpret)
    U = update_structure(M.structure, EA)
    names = set(M.valuation)
    for s in E.sub:
        names |= set(s)
    valuation = {}
    from .logic.formula import Atom
    for p in sorted(names):
        blocks = []
        for e in range(E.n):
            f = E.sub[e].get(p)
            if f is None:
                if p not in M.valuation:
                    break
                f = Atom(p)
            blocks.append(interpret(f))
        else:
            valuation[p] = U.product.assemble(blocks) & U.prebar
    return UpdatedModel(U, valuation, M, E)
