"""Relational models: classical PES models, intuitionistic Kripke models,
event structures over the language, product updates and evaluation.

States and events are referred to by position internally; names are kept for
display and I/O. Truth sets are ``frozenset`` of state positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import (AmbiguousPrecondition, CyclicEventReference, EmptyUpdate, ForestViolation,
                     NotAForest, UnknownAtom, UnknownEventName, UnsupportedConnective,
                     ValidationError)
from .logic.formula import (And, Atom, Bot, Box, Dia, DynBox, DynDia, Formula, Imp, Or, Prob,
                            ProbGt, Top, apply_substitution, big_or)


@dataclass(frozen=True)
class AgentView:
    """An agent's equivalence classes and weight function over positions."""

    partition: tuple
    P: tuple

    def cell_of(self, x: int) -> frozenset:
        for c in self.partition:
            if x in c:
                return c
        raise KeyError(x)


def _check_view(kind: str, i: str, view: AgentView, n: int, problems: list):
    seen = set()
    for c in view.partition:
        if not c:
            problems.append(f"{kind} agent {i}: empty class")
        if seen & c:
            problems.append(f"{kind} agent {i}: overlapping classes")
        seen |= c
    if seen != set(range(n)):
        problems.append(f"{kind} agent {i}: classes do not cover all {kind}s")
    if len(view.P) != n:
        problems.append(f"{kind} agent {i}: probability table has wrong length")
        return
    for x, p in enumerate(view.P):
        if not 0 < p <= 1:
            problems.append(f"{kind} agent {i}: weight of {x} is {p}, outside ]0,1]")
    for c in view.partition:
        total = sum((view.P[x] for x in c), Fraction(0))
        if total != 1:
            problems.append(f"{kind} agent {i}: class {sorted(c)} has mass {total}")


@dataclass
class PESModel:
    states: tuple
    agents: dict
    valuation: dict
    origin: tuple | None = None  # (state, event) positions when produced by an update

    def __post_init__(self):
        self.states = tuple(self.states)
        self.valuation = {p: frozenset(v) for p, v in self.valuation.items()}

    @property
    def n(self) -> int:
        return len(self.states)

    def cell(self, i: str, s: int) -> frozenset:
        return self.agents[i].cell_of(s)

    def problems(self) -> list:
        out = []
        for i, v in self.agents.items():
            _check_view("state", i, v, self.n, out)
        for p, ext in self.valuation.items():
            if not ext <= set(range(self.n)):
                out.append(f"valuation of {p} mentions unknown states")
        return out

    def validate(self) -> "PESModel":
        probs = self.problems()
        if probs:
            raise ValidationError("invalid model: " + "; ".join(probs), witness=probs)
        return self

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise ValidationError(f"unknown state {name!r}", witness=name) from None


@dataclass
class IntKripkeModel(PESModel):
    """PES model with a partial order; valuations must be up-sets."""

    order: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        super().__post_init__()
        rel = {(s, s) for s in range(len(self.states))} | set(self.order)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        self.order = frozenset(rel)
        self._up = tuple(frozenset(t for t in range(self.n) if (s, t) in rel) for s in range(self.n))

    def up(self, s: int) -> frozenset:
        return self._up[s]

    def problems(self) -> list:
        out = super().problems()
        for a, b in self.order:
            if a != b and (b, a) in self.order:
                out.append(f"order is not antisymmetric on {self.states[a]}, {self.states[b]}")
        for p, ext in self.valuation.items():
            for s in ext:
                if not self.up(s) <= ext:
                    out.append(f"valuation of {p} is not an up-set")
                    break
        for i, v in self.agents.items():
            for c in v.partition:
                if any((a in c) != (b in c) for a, b in self.order):
                    out.append(f"agent {i}: class {sorted(c)} is not closed under the order")
        return out

    @classmethod
    def discrete(cls, M: PESModel) -> "IntKripkeModel":
        return cls(M.states, M.agents, M.valuation)


@dataclass
class EventStructureL:
    """Event structure whose preconditions and substitutions are formulas.

    ``order`` is the declared strict order on precondition positions (pairs
    ``(j, k)`` meaning phi[j] entails phi[k]); it is closed transitively on
    construction. ``pre[e][j]`` is the probability of event ``e`` given
    precondition ``j``.
    """

    name: str
    events: tuple
    agents: dict
    phi: tuple
    pre: tuple
    sub: tuple
    order: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        self.events = tuple(self.events)
        self.phi = tuple(self.phi)
        self.pre = tuple(tuple(Fraction(x) for x in row) for row in self.pre)
        self.sub = tuple(dict(s) for s in self.sub)
        rel = set(self.order)
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        self.order = frozenset(rel)

    @property
    def n(self) -> int:
        return len(self.events)

    def event_index(self, eid: str) -> int:
        try:
            return self.events.index(eid)
        except ValueError:
            raise UnknownEventName(f"event structure {self.name} has no event {eid!r}",
                                   witness=eid) from None

    def cell(self, i: str, e: int) -> frozenset:
        return self.agents[i].cell_of(e)

    def cell_list(self, i: str, e: int) -> list:
        return sorted(self.cell(i, e))

    def admissible(self, e: int) -> list:
        """Preconditions under which ``e`` has positive probability."""
        return [j for j in range(len(self.phi)) if self.pre[e][j] != 0]

    def pre_formula(self, e: int) -> Formula:
        return big_or(self.phi[j] for j in self.admissible(e))

    def substitution(self, e: int) -> dict:
        return self.sub[e]

    def mb(self, j: int) -> tuple:
        below = [k for k in range(len(self.phi)) if (k, j) in self.order]
        return tuple(k for k in below if not any((k, l) in self.order for l in below))

    def problems(self) -> list:
        out = []
        for i, v in self.agents.items():
            _check_view("event", i, v, self.n, out)
        m = len(self.phi)
        if len(self.pre) != self.n or any(len(r) != m for r in self.pre):
            out.append("pre table must have one row per event and one column per precondition")
            return out
        for j in range(m):
            col = [self.pre[e][j] for e in range(self.n)]
            if any(x < 0 for x in col) or sum(col) != 1:
                out.append(f"pre(.|{self.phi[j]}) is not a distribution (sum {sum(col)})")
        for a, b in self.order:
            if a == b:
                out.append(f"declared order is cyclic at precondition {a}")
            if not (0 <= a < m and 0 <= b < m):
                out.append(f"declared order mentions unknown precondition ({a}, {b})")
        for j in range(m):
            ups = [k for k in range(m) if (j, k) in self.order]
            for x in ups:
                for y in ups:
                    if x < y and (x, y) not in self.order and (y, x) not in self.order:
                        out.append(f"declared order is not a forest: {j} lies below incomparable {x}, {y}")
        for e in range(self.n):
            for j, k in self.order:
                if self.pre[e][j] == 0 and self.pre[e][k] != 0:
                    out.append(f"pre({self.events[e]}|{j}) = 0 but pre({self.events[e]}|{k}) > 0 with {j} below {k}")
        if len(self.sub) != self.n:
            out.append("one substitution per event is required")
        return out

    def validate(self) -> "EventStructureL":
        probs = self.problems()
        if probs:
            raise ValidationError(f"invalid event structure {self.name}: " + "; ".join(probs), witness=probs)
        return self


EventRegistry = Mapping[str, EventStructureL]


def lookup_event(events: EventRegistry, name: str) -> EventStructureL:
    try:
        return events[name]
    except (KeyError, TypeError):
        raise UnknownEventName(f"unknown event structure {name!r}", witness=name) from None


# classical evaluation ----------------------------------------------------------------


class _ClassicalContext:
    """Per-call memo of truth sets and updated models."""

    def __init__(self, events: EventRegistry):
        self.events = events or {}
        self.truth: dict = {}
        self.updates: dict = {}
        self.stack: list = []
        self.keep: list = []

    def update(self, M: PESModel, name: str):
        key = (id(M), name)
        if key not in self.updates:
            if name in self.stack:
                raise CyclicEventReference(f"event structure {name} refers to itself", witness=name)
            self.stack.append(name)
            try:
                E = lookup_event(self.events, name)
                inter, up = _classical_update(M, E, self)
            finally:
                self.stack.pop()
            self.keep.append(M)
            self.updates[key] = (E, inter, up)
        return self.updates[key]


def truth_set(M: PESModel, f: Formula, events: EventRegistry | None = None) -> frozenset:
    return _truth(M, f, _ClassicalContext(events))


def _truth(M: PESModel, f: Formula, ctx: _ClassicalContext) -> frozenset:
    key = (id(M), f)
    hit = ctx.truth.get(key)
    if hit is not None:
        return hit
    everything = frozenset(range(M.n))
    if isinstance(f, Atom):
        if f.name not in M.valuation:
            raise UnknownAtom(f"atom {f.name} has no valuation", witness=f.name)
        r = M.valuation[f.name]
    elif isinstance(f, Top):
        r = everything
    elif isinstance(f, Bot):
        r = frozenset()
    elif isinstance(f, And):
        r = _truth(M, f.left, ctx) & _truth(M, f.right, ctx)
    elif isinstance(f, Or):
        r = _truth(M, f.left, ctx) | _truth(M, f.right, ctx)
    elif isinstance(f, Imp):
        r = (everything - _truth(M, f.left, ctx)) | _truth(M, f.right, ctx)
    elif isinstance(f, Dia):
        sub = _truth(M, f.sub, ctx)
        r = frozenset(s for s in range(M.n) if M.cell(f.agent, s) & sub)
    elif isinstance(f, Box):
        sub = _truth(M, f.sub, ctx)
        r = frozenset(s for s in range(M.n) if M.cell(f.agent, s) <= sub)
    elif isinstance(f, Prob):
        exts = [(c, _truth(M, g, ctx)) for c, g in f.terms]
        strict = isinstance(f, ProbGt)
        out = set()
        for s in range(M.n):
            total = sum((c * _mass(M, f.agent, s, ext) for c, ext in exts), Fraction(0))
            if total > f.bound or (not strict and total == f.bound):
                out.add(s)
        r = frozenset(out)
    elif isinstance(f, (DynDia, DynBox)):
        E, _, up = ctx.update(M, f.event)
        e = E.event_index(f.eid)
        sub = _truth(up, f.sub, ctx)
        alive = {s for (s, ee) in up.origin if ee == e}
        good = {up.origin[k][0] for k in sub if up.origin[k][1] == e}
        if isinstance(f, DynDia):
            r = frozenset(good)
        else:
            r = frozenset(s for s in range(M.n) if s not in alive or s in good)
    else:
        raise TypeError(f"not a formula: {f!r}")
    ctx.truth[key] = r
    ctx.keep.append(M)
    return r


def _mass(M: PESModel, i: str, s: int, ext: frozenset) -> Fraction:
    P = M.agents[i].P
    return sum((P[t] for t in M.cell(i, s) if t in ext), Fraction(0))


def model_measure(M: PESModel, i: str, s: int, f: Formula, events: EventRegistry | None = None) -> Fraction:
    """Mass, under agent ``i`` at state ``s``, of the states satisfying ``f``."""
    return _mass(M, i, s, truth_set(M, f, events))


def eval_classical(M: PESModel, s: int, f: Formula, events: EventRegistry | None = None) -> bool:
    return s in truth_set(M, f, events)


# classical update ----------------------------------------------------------------------


@dataclass
class Intermediate:
    """All (state, event) pairs with their unnormalised weights."""

    pairs: tuple
    agents: dict  # agent -> partition of pair positions
    weights: dict  # agent -> tuple of Fractions per pair
    valuation: dict
    names: tuple


def pre_given_state(M: PESModel, E: EventStructureL, e: int, s: int,
                    events: EventRegistry | None = None) -> Fraction:
    """pre(e|φ) for the unique precondition φ true at ``s``; 0 when none holds."""
    ctx = _ClassicalContext(events)
    return _pre_given_state(M, E, e, s, [_truth(M, phi, ctx) for phi in E.phi])


def _pre_given_state(M, E, e, s, exts) -> Fraction:
    holding = [j for j, ext in enumerate(exts) if s in ext]
    if len(holding) > 1:
        raise AmbiguousPrecondition(
            f"preconditions {[str(E.phi[j]) for j in holding]} all hold at {M.states[s]}",
            witness=(M.states[s], holding))
    return E.pre[e][holding[0]] if holding else Fraction(0)


def _pair_name(M: PESModel, E: EventStructureL, s: int, e: int) -> str:
    return f"({M.states[s]},{E.events[e]})"


def _product_partition(M, E, i, pairs):
    pos = {p: k for k, p in enumerate(pairs)}
    out = []
    for sc in M.agents[i].partition:
        for ec in E.agents[i].partition:
            c = frozenset(pos[(s, e)] for s in sc for e in ec if (s, e) in pos)
            if c:
                out.append(c)
    return tuple(sorted(out, key=min))


def classical_update(M: PESModel, E: EventStructureL, events: EventRegistry | None = None):
    """Return ``(intermediate, updated_model)``."""
    registry = dict(events or {})
    registry.setdefault(E.name, E)
    return _classical_update(M, E, _ClassicalContext(registry))


def intermediate_structure(M: PESModel, E: EventStructureL,
                           events: EventRegistry | None = None) -> Intermediate:
    """The coproduct of the model over the events, before restriction."""
    registry = dict(events or {})
    registry.setdefault(E.name, E)
    return _intermediate(M, E, _ClassicalContext(registry))[0]


def _intermediate(M: PESModel, E: EventStructureL, ctx: _ClassicalContext):
    if set(E.agents) != set(M.agents):
        raise ValidationError(f"event structure {E.name} and model disagree on agents")
    exts = [_truth(M, phi, ctx) for phi in E.phi]
    pairs = tuple((s, e) for s in range(M.n) for e in range(E.n))
    pre = {(s, e): _pre_given_state(M, E, e, s, exts) for s, e in pairs}
    weights = {i: tuple(M.agents[i].P[s] * E.agents[i].P[e] * pre[(s, e)] for s, e in pairs)
               for i in M.agents}
    inter = Intermediate(
        pairs=pairs,
        agents={i: _product_partition(M, E, i, pairs) for i in M.agents},
        weights=weights,
        valuation={p: frozenset(k for k, (s, _) in enumerate(pairs) if s in ext)
                   for p, ext in M.valuation.items()},
        names=tuple(_pair_name(M, E, s, e) for s, e in pairs),
    )
    return inter, pre


def _classical_update(M: PESModel, E: EventStructureL, ctx: _ClassicalContext):
    inter, pre = _intermediate(M, E, ctx)
    pairs, weights = inter.pairs, inter.weights
    kept = tuple(p for p in pairs if pre[p] > 0)
    if not kept:
        raise EmptyUpdate(f"no event of {E.name} is executable anywhere")
    idx = {p: k for k, p in enumerate(pairs)}
    agents = {}
    for i in M.agents:
        part = _product_partition(M, E, i, kept)
        P = [Fraction(0)] * len(kept)
        for c in part:
            total = sum((weights[i][idx[kept[k]]] for k in c), Fraction(0))
            for k in c:
                P[k] = weights[i][idx[kept[k]]] / total
        agents[i] = AgentView(part, tuple(P))
    valuation = _updated_valuation(M, E, kept, lambda f: _truth(M, f, ctx))
    up = PESModel(tuple(_pair_name(M, E, s, e) for s, e in kept), agents, valuation, origin=kept)
    return inter, up


def _updated_valuation(M, E, kept, truth):
    names = set(M.valuation)
    for s in E.sub:
        names |= set(s)
    out = {}
    for p in sorted(names):
        ext = set()
        for k, (s, e) in enumerate(kept):
            f = E.sub[e].get(p)
            if f is None:
                if p not in M.valuation:
                    break
                f = Atom(p)
            if s in truth(f):
                ext.add(k)
        else:
            out[p] = frozenset(ext)
    return out


# intuitionistic static evaluation and update -------------------------------------------------


def int_truth_set(M: IntKripkeModel, f: Formula) -> frozenset:
    """Up-set of states forcing ``f`` (no modalities or probability atoms)."""
    if isinstance(f, Atom):
        if f.name not in M.valuation:
            raise UnknownAtom(f"atom {f.name} has no valuation", witness=f.name)
        return M.valuation[f.name]
    if isinstance(f, Top):
        return frozenset(range(M.n))
    if isinstance(f, Bot):
        return frozenset()
    if isinstance(f, And):
        return int_truth_set(M, f.left) & int_truth_set(M, f.right)
    if isinstance(f, Or):
        return int_truth_set(M, f.left) | int_truth_set(M, f.right)
    if isinstance(f, Imp):
        a = int_truth_set(M, f.left)
        b = int_truth_set(M, f.right)
        return frozenset(s for s in range(M.n) if all(t in b for t in M.up(s) if t in a))
    raise UnsupportedConnective(
        f"{type(f).__name__} has no relational intuitionistic semantics here", witness=str(f))


def eval_int_static(M: IntKripkeModel, s: int, f: Formula) -> bool:
    return s in int_truth_set(M, f)


def check_forest(M: IntKripkeModel, E: EventStructureL) -> list:
    """Semantic forest check of the declared precondition order on ``M``."""
    exts = [int_truth_set(M, phi) for phi in E.phi]
    bad = []
    for j in range(len(E.phi)):
        for k in range(len(E.phi)):
            if j == k:
                continue
            if (j, k) in E.order:
                if not exts[j] <= exts[k]:
                    bad.append((j, k, "declared entailment fails"))
            elif (k, j) not in E.order and j < k and exts[j] & exts[k]:
                bad.append((j, k, "neither disjoint nor ordered"))
    return bad


def int_coproduct_weights(M: IntKripkeModel, E: EventStructureL, s: int, e: int, i: str,
                          _memo: dict | None = None, _exts: list | None = None) -> Fraction:
    """Weight of (s, e) by recursion on the inverse order.

    Each precondition contributes ``P(e)·P^α(s)·pre(e|α)`` where ``P^α(s)``
    sums the states above ``s`` whose most specific true precondition is α;
    the weights already assigned to states strictly above ``s`` are then
    subtracted.
    """
    if _exts is None:
        bad = check_forest(M, E)
        if bad:
            raise NotAForest(f"preconditions of {E.name} do not form a forest on this model", witness=bad)
        _exts = [int_truth_set(M, phi) for phi in E.phi]
    memo = {} if _memo is None else _memo
    key = (s, e, i)
    if key in memo:
        return memo[key]
    P = M.agents[i].P
    Pe = E.agents[i].P[e]
    total = Fraction(0)
    for a in range(len(E.phi)):
        stronger = [b for b in range(len(E.phi)) if b != a and (b, a) in E.order]
        mass = sum((P[t] for t in M.up(s)
                    if t in _exts[a] and not any(t in _exts[b] for b in stronger)), Fraction(0))
        total += Pe * mass * E.pre[e][a]
    for t in M.up(s):
        if t != s:
            total -= int_coproduct_weights(M, E, t, e, i, memo, _exts)
    memo[key] = total
    return total


def int_update(M: IntKripkeModel, E: EventStructureL) -> IntKripkeModel:
    bad = check_forest(M, E)
    if bad:
        raise NotAForest(f"preconditions of {E.name} do not form a forest on this model", witness=bad)
    if set(E.agents) != set(M.agents):
        raise ValidationError(f"event structure {E.name} and model disagree on agents")
    exts = [int_truth_set(M, phi) for phi in E.phi]
    memo: dict = {}
    pairs = [(s, e) for s in range(M.n) for e in range(E.n)]
    w = {i: {p: int_coproduct_weights(M, E, p[0], p[1], i, memo, exts) for p in pairs} for i in M.agents}
    first = next(iter(M.agents))
    kept = tuple(p for p in pairs if w[first][p] > 0)
    for i in M.agents:
        if any((w[i][p] > 0) != (p in kept) for p in pairs):
            raise ValidationError("agents disagree on which pairs survive the update")
    if not kept:
        raise EmptyUpdate(f"no event of {E.name} is executable anywhere")
    agents = {}
    for i in M.agents:
        part = _product_partition(M, E, i, kept)
        P = [Fraction(0)] * len(kept)
        for c in part:
            total = sum((w[i][kept[k]] for k in c), Fraction(0))
            for k in c:
                P[k] = w[i][kept[k]] / total
        agents[i] = AgentView(part, tuple(P))
    pos = {p: k for k, p in enumerate(kept)}
    order = frozenset((pos[(s, e)], pos[(t, e2)]) for (s, e) in kept for (t, e2) in kept
                      if e == e2 and (s, t) in M.order)
    valuation = _updated_valuation(M, E, kept, lambda f: int_truth_set(M, f))
    return IntKripkeModel(tuple(_pair_name(M, E, s, e) for s, e in kept), agents, valuation,
                          origin=kept, order=order)


def substitute_event(E: EventStructureL, e: int, f: Formula) -> Formula:
    return apply_substitution(E.sub[e], f)


def discrete_copy(M: PESModel) -> IntKripkeModel:
    return IntKripkeModel(M.states, M.agents, M.valuation)


def forest_violation(E: EventStructureL, pair, reason) -> ForestViolation:
    j, k = pair
    return ForestViolation(f"preconditions {E.phi[j]} and {E.phi[k]}: {reason}", witness=(j, k))


__all__ = [
    "AgentView", "PESModel", "IntKripkeModel", "EventStructureL", "Intermediate",
    "truth_set", "model_measure", "eval_classical", "pre_given_state", "classical_update",
    "intermediate_structure",
    "int_truth_set", "eval_int_static", "int_coproduct_weights", "int_update", "check_forest",
    "lookup_event",
]
