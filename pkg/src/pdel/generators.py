"""Seeded random instances for property tests and the check suites.

Every generator takes a ``random.Random`` so runs are reproducible. Rational
weights have denominators at most ``MAX_DEN``.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .algebra import BlockEHA, FiniteLattice, iter_bits
from .logic.formula import (BOT, TOP, And, Atom, Box, Dia, DynBox, DynDia, Formula, Imp, Not, Or,
                            prob)
from .measures import APEModel, APEStructure, weight_measure
from .relational import AgentView, EventStructureL, IntKripkeModel, PESModel

MAX_DEN = 12
AGENTS = ("a", "b")
ATOMS = ("p", "q")
COEFFS = (Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(-1, 3))
BOUNDS = (Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1), Fraction(-1, 2))


def distribution(rng: random.Random, k: int, max_den: int = MAX_DEN, zeros: bool = False) -> list:
    """``k`` rationals summing to 1 with a common denominator <= ``max_den``.

    Entries are positive unless ``zeros`` is set (at least one stays positive).
    """
    lo = 1 if zeros else k
    d = rng.randint(max(lo, 1), max(max_den, k))
    if zeros:
        cuts = sorted(rng.randint(0, d) for _ in range(k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    else:
        cuts = sorted(rng.sample(range(1, d), k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    return [Fraction(x, d) for x in parts]


def partition(rng: random.Random, items, max_blocks: int | None = None) -> tuple:
    items = list(items)
    rng.shuffle(items)
    nb = rng.randint(1, len(items) if max_blocks is None else min(max_blocks, len(items)))
    blocks: list = [[] for _ in range(nb)]
    for k, x in enumerate(items):
        blocks[k if k < nb else rng.randrange(nb)].append(x)
    return tuple(sorted((frozenset(b) for b in blocks if b), key=min))


def agent_view(rng: random.Random, n: int, blocks=None) -> AgentView:
    part = blocks if blocks is not None else partition(rng, range(n))
    P = [Fraction(0)] * n
    for c in part:
        cs = sorted(c)
        for x, w in zip(cs, distribution(rng, len(cs))):
            P[x] = w
    return AgentView(tuple(part), tuple(P))


def pes_model(rng: random.Random, max_states: int = 4, agents=AGENTS, atoms=ATOMS) -> PESModel:
    n = rng.randint(1, max_states)
    val = {p: frozenset(s for s in range(n) if rng.random() < 0.5) for p in atoms}
    return PESModel(tuple(f"s{s}" for s in range(n)), {i: agent_view(rng, n) for i in agents},
                    val).validate()


def poset(rng: random.Random, n: int, density: float = 0.35) -> frozenset:
    """Strict order pairs (a, b), a below b, compatible with index order."""
    rel = set()
    for b in range(n):
        for a in range(b):
            if rng.random() < density:
                rel.add((a, b))
    changed = True
    while changed:
        changed = False
        for a, b in list(rel):
            for c, d in list(rel):
                if b == c and (a, d) not in rel:
                    rel.add((a, d))
                    changed = True
    return frozenset(rel)


def components(n: int, rel) -> list:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in rel:
        parent[find(a)] = find(b)
    groups: dict = {}
    for x in range(n):
        groups.setdefault(find(x), set()).add(x)
    return [frozenset(g) for g in groups.values()]


def _grouped_partition(rng, comps) -> tuple:
    blocks = partition(rng, range(len(comps)))
    return tuple(sorted((frozenset().union(*(comps[k] for k in b)) for b in blocks), key=min))


def int_model(rng: random.Random, max_states: int = 4, agents=AGENTS, atoms=ATOMS,
              discrete: bool = False) -> IntKripkeModel:
    n = rng.randint(1, max_states)
    rel = frozenset() if discrete else poset(rng, n)
    comps = components(n, rel)
    views = {i: agent_view(rng, n, _grouped_partition(rng, comps)) for i in agents}
    up = {s: {s} | {t for a, t in rel if a == s} for s in range(n)}
    val = {}
    for p in atoms:
        ext = set()
        for s in range(n):
            if rng.random() < 0.4:
                ext |= up[s]
        val[p] = frozenset(ext)
    return IntKripkeModel(tuple(f"s{s}" for s in range(n)), views, val, order=rel).validate()


# algebras and APE models -------------------------------------------------------------


def block_eha(rng: random.Random, max_points: int = 4, agents=AGENTS, max_elements: int = 16,
              boolean: bool = False) -> BlockEHA:
    """Random epistemic Heyting algebra with at most ``max_elements`` elements."""
    while True:
        n = rng.randint(1, max_points)
        rel = frozenset() if boolean else poset(rng, n)
        lower = [0] * n
        for a, b in rel:
            lower[b] |= 1 << a
        L = FiniteLattice(lower)
        if L.size <= max_elements:
            break
    comps = [sum(1 << x for x in c) for c in components(n, rel)]
    blocks = {}
    for i in agents:
        groups = partition(rng, range(len(comps)))
        blocks[i] = tuple(sorted(sum(comps[k] for k in g) for g in groups))
    return BlockEHA(L, blocks)


def weight_measures(rng: random.Random, A: BlockEHA) -> dict:
    out = {}
    for i in A.agents:
        w = {}
        for b in A.blocks[i]:
            bits = list(iter_bits(b))
            for j, x in zip(bits, distribution(rng, len(bits))):
                w[j] = x
        out[i] = weight_measure(A, i, w)
    return out


def random_element(rng: random.Random, L: FiniteLattice) -> int:
    out = 0
    for j in L.linear_extension():
        if rng.random() < 0.5:
            out |= L.down[j]
    return out


def ape_model(rng: random.Random, max_points: int = 4, agents=AGENTS, atoms=ATOMS,
              max_elements: int = 16, boolean: bool = False) -> APEModel:
    A = block_eha(rng, max_points, agents, max_elements, boolean)
    val = {p: random_element(rng, A.lattice) for p in atoms}
    return APEModel(APEStructure(A, weight_measures(rng, A)), val)


# formulas ----------------------------------------------------------------------


def static_formula(rng: random.Random, depth: int, atoms=ATOMS, agents=AGENTS,
                   probability: bool = True, modal: bool = True) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.8:
            return Atom(rng.choice(atoms))
        return TOP if r < 0.9 else BOT
    kinds = ["and", "or", "imp", "not"]
    if modal:
        kinds += ["dia", "box"] + (["prob"] if probability else [])
    k = rng.choice(kinds)
    sub = lambda: static_formula(rng, depth - 1, atoms, agents, probability, modal)  # noqa: E731
    if k == "and":
        return And(sub(), sub())
    if k == "or":
        return Or(sub(), sub())
    if k == "imp":
        return Imp(sub(), sub())
    if k == "not":
        return Not(sub())
    if k == "dia":
        return Dia(rng.choice(agents), sub())
    if k == "box":
        return Box(rng.choice(agents), sub())
    return prob_atom(rng, sub, agents)


def prob_atom(rng: random.Random, sub, agents=AGENTS) -> Formula:
    terms = [(rng.choice(COEFFS), sub()) for _ in range(rng.randint(1, 2))]
    return prob(rng.choice(agents), terms, rng.choice(BOUNDS), strict=rng.random() < 0.25)


def dynamic_formula(rng: random.Random, depth: int, events: dict, dyn_depth: int = 2,
                    atoms=ATOMS, agents=AGENTS) -> Formula:
    """Formula whose dynamic modalities are nested at most ``dyn_depth`` deep."""
    if depth <= 0 or rng.random() < 0.2:
        r = rng.random()
        if r < 0.8:
            return Atom(rng.choice(atoms))
        return TOP if r < 0.9 else BOT
    kinds = ["and", "or", "imp", "not", "dia", "box", "prob"]
    if dyn_depth > 0 and events:
        kinds += ["dyn"] * 4
    k = rng.choice(kinds)
    sub = lambda d=dyn_depth: dynamic_formula(rng, depth - 1, events, d, atoms, agents)  # noqa: E731
    if k == "dyn":
        name = rng.choice(sorted(events))
        E = events[name]
        cls = DynDia if rng.random() < 0.5 else DynBox
        return cls(name, rng.choice(E.events), sub(dyn_depth - 1))
    if k == "and":
        return And(sub(), sub())
    if k == "or":
        return Or(sub(), sub())
    if k == "imp":
        return Imp(sub(), sub())
    if k == "not":
        return Not(sub())
    if k == "dia":
        return Dia(rng.choice(agents), sub())
    if k == "box":
        return Box(rng.choice(agents), sub())
    return prob_atom(rng, sub, agents)


# event structures --------------------------------------------------------------


def _event_views(rng, n_events, agents):
    return {i: agent_view(rng, n_events) for i in agents}


def _substitutions(rng, n_events, atoms, agents, rate=0.3, modal=True):
    out = []
    for _ in range(n_events):
        s = {}
        for p in atoms:
            if rng.random() < rate:
                s[p] = static_formula(rng, 1, atoms, agents, probability=False, modal=modal)
        out.append(s)
    return tuple(out)


def _pre_columns(rng, n_events, supports):
    """pre[e][j] with each column a distribution supported exactly on supports[j]."""
    m = len(supports)
    pre = [[Fraction(0)] * m for _ in range(n_events)]
    for j, supp in enumerate(supports):
        supp = sorted(supp)
        for e, w in zip(supp, distribution(rng, len(supp))):
            pre[e][j] = w
    return tuple(tuple(r) for r in pre)


def classical_event(rng: random.Random, name: str = "Ev", max_events: int = 3, agents=AGENTS,
                    atoms=ATOMS, bases: int | None = None, drop: float = 0.2,
                    modal: bool = True) -> EventStructureL:
    """Pairwise inconsistent preconditions: conjunctions of literals over random bases."""
    n_events = rng.randint(1, max_events)
    k = rng.randint(0, 2) if bases is None else bases
    base = [static_formula(rng, 1, atoms, agents, modal=modal) for _ in range(k)]
    cubes = [TOP] if k == 0 else []
    for bitsel in range(2 ** k if k else 0):
        lits = [b if bitsel >> t & 1 else Not(b) for t, b in enumerate(base)]
        f = lits[0]
        for x in lits[1:]:
            f = And(f, x)
        cubes.append(f)
    kept = [c for c in cubes if rng.random() >= drop] or cubes[:1]
    supports = [set(rng.sample(range(n_events), rng.randint(1, n_events))) for _ in kept]
    return EventStructureL(name=name, events=tuple(f"e{e + 1}" for e in range(n_events)),
                           agents=_event_views(rng, n_events, agents), phi=tuple(kept),
                           pre=_pre_columns(rng, n_events, supports),
                           sub=_substitutions(rng, n_events, atoms, agents, modal=modal)).validate()


def forest_event(rng: random.Random, name: str = "Ev", max_events: int = 3, agents=AGENTS,
                 atoms=ATOMS, max_members: int = 5, copies: bool = True,
                 modal: bool = True) -> EventStructureL:
    """Preconditions forming a declared forest: children refine a parent by a
    formula and its negation. Occasionally a member is duplicated as a copy
    ordered below the original."""
    n_events = rng.randint(1, max_events)
    phi: list = []
    parent: list = []

    def base():
        return static_formula(rng, 1, atoms, agents, modal=modal)

    roots = [TOP] if rng.random() < 0.6 else [base(), Not(base())]
    if len(roots) == 2:
        roots[1] = Not(roots[0])
    for r in roots:
        phi.append(r)
        parent.append(None)
    frontier = list(range(len(phi)))
    while frontier and len(phi) < max_members:
        j = frontier.pop(0)
        if rng.random() < 0.5:
            continue
        b = base()
        for child in (And(phi[j], b), And(phi[j], Not(b))):
            if len(phi) < max_members and rng.random() < 0.85:
                phi.append(child)
                parent.append(j)
                frontier.append(len(phi) - 1)
    if copies and rng.random() < 0.3 and len(phi) < max_members + 1:
        j = rng.randrange(len(phi))
        # the copy sits directly below the original, taking over its children
        phi.append(phi[j] if rng.random() < 0.5 else And(phi[j], TOP))
        c = len(phi) - 1
        parent.append(j)
        for k in range(len(phi) - 1):
            if parent[k] == j and k != c:
                parent[k] = c
    m = len(phi)
    order = set()
    for k in range(m):
        p = parent[k]
        while p is not None:
            order.add((k, p))
            p = parent[p]
    # supports grow downward: a child's support contains its parent's
    supports: list = [None] * m
    depth = {k: sum(1 for (a, _) in order if a == k) for k in range(m)}
    for k in sorted(range(m), key=lambda k: depth[k]):
        p = parent[k]
        base_supp = set() if p is None else set(supports[p])
        extra = set(rng.sample(range(n_events), rng.randint(0, n_events)))
        s = base_supp | extra
        if not s:
            s = {rng.randrange(n_events)}
        supports[k] = s
    return EventStructureL(name=name, events=tuple(f"e{e + 1}" for e in range(n_events)),
                           agents=_event_views(rng, n_events, agents), phi=tuple(phi),
                           pre=_pre_columns(rng, n_events, supports),
                           sub=_substitutions(rng, n_events, atoms, agents, modal=modal),
                           order=frozenset(order)).validate()


def executable(M, E, events=None) -> bool:
    """Whether some state satisfies a precondition with positive probability."""
    from .relational import truth_set
    for j, phi in enumerate(E.phi):
        if any(E.pre[e][j] for e in range(E.n)) and truth_set(M, phi, events):
            return True
    return False


def classical_pair(rng: random.Random, max_states: int = 4, max_events: int = 3, agents=AGENTS,
                   atoms=ATOMS, modal: bool = True):
    """A PES model with an event structure executable somewhere on it."""
    while True:
        M = pes_model(rng, max_states, agents, atoms)
        E = classical_event(rng, max_events=max_events, agents=agents, atoms=atoms, modal=modal)
        if executable(M, E):
            return M, E


def int_pair(rng: random.Random, max_states: int = 4, max_events: int = 3, agents=AGENTS,
             atoms=ATOMS, discrete: bool = False):
    """An intuitionistic model with a forest event structure sound on it."""
    from .relational import check_forest, int_coproduct_weights
    while True:
        M = int_model(rng, max_states, agents, atoms, discrete)
        E = forest_event(rng, max_events=max_events, agents=agents, atoms=atoms, modal=False)
        if check_forest(M, E):
            continue
        i = agents[0]
        if any(int_coproduct_weights(M, E, s, e, i) > 0 for s in range(M.n) for e in range(E.n)):
            return M, E


def identity_event(agents=AGENTS, name: str = "Id") -> EventStructureL:
    return EventStructureL(name=name, events=("e1",),
                           agents={i: AgentView((frozenset({0}),), (Fraction(1),)) for i in agents},
                           phi=(TOP,), pre=((Fraction(1),),), sub=({},)).validate()
