"""JSON readers and writers.

Formats
-------
algebra   ``{"n", "leq": [[a, b], ...], "agents": {i: {"diamond": [...], "box": [...]}}}``
measure   ``{"agent", "values": {"<element index>": "p/q"}}``
model     ``{"states", "order"?, "agents": {i: {"partition", "P": {state: "p/q"}}}, "valuation"}``
APE model ``{"algebra", "measures": [...], "valuation": {atom: element index}}``
event     ``{"name", "events", "agents": {i: {"partition", "P"}}, "phi": [formula, ...],
            "order"?: [[j, k], ...], "pre": {event: ["p/q", ...]}, "sub"?: {event: {atom: formula}}}``
pattern   ``{"agent", "atoms": [{"formula", "cells": {"<cell index>": 0|1}}]}`` (or a list of these)

Elements are referred to by their position in the algebra file; ``order``
pairs ``[j, k]`` in an event file say that ``phi[j]`` entails ``phi[k]``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .algebra import EpistemicHeytingAlgebra, eha_from_json, eha_to_json
from .errors import FormulaSyntaxError, InputError, PdelError
from .logic.formula import parse, to_text
from .measures import APEModel, APEStructure, TableMeasure, measure_from_json, measure_to_json
from .relational import AgentView, EventStructureL, IntKripkeModel, PESModel
from .synthesis import SignPattern


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as ex:
        raise InputError(f"cannot read {path}: {ex.strerror}", witness=str(path)) from None
    except json.JSONDecodeError as ex:
        raise InputError(f"{path}: invalid JSON ({ex.msg} at line {ex.lineno})", witness=str(path)) from None


def rational(x, where: str = "") -> Fraction:
    try:
        return Fraction(str(x))
    except (ValueError, ZeroDivisionError):
        raise InputError(f"{where}: {x!r} is not a rational number", witness=x) from None


def formula(text: str, where: str = ""):
    try:
        return parse(text)
    except FormulaSyntaxError as ex:
        raise InputError(f"{where}: {ex}", witness=text) from None


def _need(data: Mapping, key: str, where: str):
    if not isinstance(data, Mapping) or key not in data:
        raise InputError(f"{where}: missing field {key!r}", witness=key)
    return data[key]


def _view(data: Mapping, names: list, where: str) -> AgentView:
    index = {n: k for k, n in enumerate(names)}
    try:
        part = tuple(frozenset(index[x] for x in block) for block in _need(data, "partition", where))
    except KeyError as ex:
        raise InputError(f"{where}: unknown name {ex.args[0]!r} in partition", witness=ex.args[0]) from None
    P = _need(data, "P", where)
    if isinstance(P, Mapping):
        unknown = set(P) - set(names)
        if unknown:
            raise InputError(f"{where}: probabilities for unknown names {sorted(unknown)}")
        probs = tuple(rational(P.get(n, 0), where) for n in names)
    else:
        probs = tuple(rational(x, where) for x in P)
    return AgentView(part, probs)


# relational models -------------------------------------------------------------------


def model_from_json(data: Mapping) -> PESModel:
    states = [str(s) for s in _need(data, "states", "model")]
    index = {s: k for k, s in enumerate(states)}
    if len(index) != len(states):
        raise InputError("model: duplicate state names")
    agents = {str(i): _view(v, states, f"model agent {i}") for i, v in _need(data, "agents", "model").items()}
    try:
        valuation = {str(p): {index[s] for s in ext} for p, ext in data.get("valuation", {}).items()}
        order = None if "order" not in data else frozenset((index[a], index[b]) for a, b in data["order"])
    except KeyError as ex:
        raise InputError(f"model: unknown state {ex.args[0]!r}", witness=ex.args[0]) from None
    if order is None:
        return PESModel(tuple(states), agents, valuation).validate()
    return IntKripkeModel(tuple(states), agents, valuation, order=order).validate()


def model_to_json(M: PESModel) -> dict:
    out: dict = {"states": list(M.states)}
    if isinstance(M, IntKripkeModel):
        out["order"] = sorted([M.states[a], M.states[b]] for a, b in M.order if a != b)
    out["agents"] = {i: {"partition": [[M.states[s] for s in sorted(c)] for c in v.partition],
                         "P": {M.states[s]: str(p) for s, p in enumerate(v.P)}}
                     for i, v in M.agents.items()}
    out["valuation"] = {p: [M.states[s] for s in sorted(ext)] for p, ext in sorted(M.valuation.items())}
    return out


# algebraic models --------------------------------------------------------------------


def ape_from_json(data: Mapping) -> APEModel:
    A = algebra_from_json(_need(data, "algebra", "APE model"))
    els = A.lattice.elements
    measures = {}
    for m in data.get("measures", []):
        measures[str(_need(m, "agent", "measure"))] = measure_from_json(A, m)
    try:
        valuation = {str(p): els[int(k)] for p, k in data.get("valuation", {}).items()}
    except (IndexError, ValueError, TypeError):
        raise InputError("APE model: valuation entries must be element indices") from None
    return APEModel(APEStructure(A, measures), valuation)


def ape_to_json(M: APEModel) -> dict:
    A = M.algebra
    idx = {x: k for k, x in enumerate(A.lattice.elements)}
    return {"algebra": eha_to_json(A),
            "measures": [measure_to_json(m, A) for m in M.measures.values() if isinstance(m, TableMeasure)],
            "valuation": {p: idx[x] for p, x in sorted(M.valuation.items())}}


def algebra_from_json(data: Mapping) -> EpistemicHeytingAlgebra:
    try:
        return eha_from_json(data)
    except (KeyError, TypeError, ValueError, IndexError) as ex:
        raise InputError(f"algebra: malformed ({ex})") from None


def load_model(path):
    """A relational model or an APE model, told apart by its fields."""
    data = load_json(path)
    if isinstance(data, Mapping) and "algebra" in data:
        return ape_from_json(data)
    return model_from_json(data)


# event structures --------------------------------------------------------------------


def event_from_json(data: Mapping) -> EventStructureL:
    name = str(_need(data, "name", "event"))
    where = f"event {name}"
    events = [str(e) for e in _need(data, "events", where)]
    agents = {str(i): _view(v, events, f"{where} agent {i}") for i, v in _need(data, "agents", where).items()}
    phi = tuple(formula(f, f"{where} phi") for f in _need(data, "phi", where))
    pre_data = _need(data, "pre", where)
    try:
        rows = [pre_data[e] for e in events]
    except KeyError as ex:
        raise InputError(f"{where}: no pre row for event {ex.args[0]!r}") from None
    pre = tuple(tuple(rational(x, f"{where} pre") for x in row) for row in rows)
    sub_data = data.get("sub", {})
    sub = tuple({str(p): formula(f, f"{where} sub") for p, f in sub_data.get(e, {}).items()} for e in events)
    order = frozenset((int(a), int(b)) for a, b in data.get("order", []))
    return EventStructureL(name, tuple(events), agents, phi, pre, sub, order).validate()


def event_to_json(E: EventStructureL) -> dict:
    return {
        "name": E.name,
        "events": list(E.events),
        "agents": {i: {"partition": [[E.events[e] for e in sorted(c)] for c in v.partition],
                       "P": {E.events[e]: str(p) for e, p in enumerate(v.P)}} for i, v in E.agents.items()},
        "phi": [to_text(f) for f in E.phi],
        "order": sorted([a, b] for a, b in E.order),
        "pre": {E.events[e]: [str(x) for x in row] for e, row in enumerate(E.pre)},
        "sub": {E.events[e]: {p: to_text(f) for p, f in s.items()} for e, s in enumerate(E.sub) if s},
    }


def load_events(paths) -> dict:
    out = {}
    for p in paths:
        E = event_from_json(load_json(p))
        if E.name in out:
            raise InputError(f"two event structures named {E.name}", witness=E.name)
        out[E.name] = E
    return out


# patterns -----------------------------------------------------------------------------


def pattern_from_json(data: Mapping) -> SignPattern:
    agent = str(_need(data, "agent", "pattern"))
    atoms, bits = [], []
    for a in _need(data, "atoms", "pattern"):
        atoms.append(formula(_need(a, "formula", "pattern atom"), "pattern atom"))
        bits.append({int(k): int(v) for k, v in a.get("cells", {}).items()})
    try:
        return SignPattern(agent, atoms, bits)
    except PdelError as ex:
        raise InputError(f"pattern: {ex}") from None


def patterns_from_json(data) -> tuple[dict, dict]:
    """Patterns keyed by agent, plus an optional valuation (atom -> element index)."""
    valuation = {}
    if isinstance(data, Mapping) and "patterns" in data:
        valuation = dict(data.get("valuation", {}))
        data = data["patterns"]
    items = data if isinstance(data, list) else [data]
    pats = {}
    for d in items:
        p = pattern_from_json(d)
        if p.agent in pats:
            raise InputError(f"two patterns for agent {p.agent}")
        pats[p.agent] = p
    return pats, valuation


def dump(obj, path=None) -> str:
    text = json.dumps(obj, indent=2, default=_default)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
    return text


def _default(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


__all__ = ["load_json", "model_from_json", "model_to_json", "ape_from_json", "ape_to_json", "algebra_from_json",
           "load_model", "event_from_json", "event_to_json", "load_events", "pattern_from_json",
           "patterns_from_json", "dump", "rational", "formula"]
