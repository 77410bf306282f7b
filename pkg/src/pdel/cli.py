"""Command line front end.

Exit status: 0 on success, 1 on validation failures (including failed check
suites), 2 on unreadable files or formulas, 3 when a pattern is infeasible.
"""

from __future__ import annotations

import functools
import json
import sys

import click

from . import io
from .algebra import eha_to_json, iter_bits
from .art import demo_art, render_demo
from .duality import upset_algebra
from .errors import InputError, PdelError
from .logic.formula import to_text
from .logic.rewrite import rewrite_with_trace
from .logic.semantics import eval_algebraic
from .measures import APEModel, TableMeasure, measure_to_json
from .relational import IntKripkeModel, PESModel, classical_update, int_update, truth_set
from .suites import SUITES
from .synthesis import synthesize_measures
from .update import update_model


def _emit(obj, as_json: bool, text: str | None = None):
    if as_json:
        click.echo(io.dump(obj))
    else:
        click.echo(text if text is not None else io.dump(obj))


def _fail(ex: PdelError, as_json: bool):
    if as_json:
        click.echo(io.dump({"error": type(ex).__name__, "message": str(ex), "witness": ex.witness}))
    else:
        click.echo(f"error: {type(ex).__name__}: {ex}", err=True)
        if ex.witness is not None:
            click.echo(f"witness: {io.dump(ex.witness)}", err=True)
    sys.exit(ex.exit_code)


def _guard(fn):
    """Map library errors to exit codes."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        as_json = kwargs.get("as_json", False)
        try:
            return fn(*args, **kwargs)
        except PdelError as ex:
            _fail(ex, as_json)
    return wrapper


json_option = click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
events_option = click.option("--event", "event_files", multiple=True, type=click.Path(),
                             help="Event structure file; repeatable.")


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Probabilistic dynamic epistemic logic on finite models and algebras."""


def _states(M: PESModel, ext) -> list:
    return [M.states[s] for s in sorted(ext)]


def _elements(M: APEModel, x: int) -> dict:
    L = M.algebra.lattice
    return {"element": L.index(x), "points": sorted(iter_bits(x))}


@main.command("eval")
@click.option("--model", "model_file", required=True, type=click.Path())
@click.option("--formula", "text", required=True)
@click.option("--state", default=None, help="Report truth at this state only.")
@events_option
@json_option
@_guard
def eval_cmd(model_file, text, state, event_files, as_json):
    """Extension of a formula (or its truth at one state)."""
    M = io.load_model(model_file)
    f = io.formula(text, "--formula")
    events = io.load_events(event_files)
    if isinstance(M, APEModel):
        if state is not None:
            raise InputError("--state needs a relational model")
        x = eval_algebraic(M, f, events)
        res = {"formula": to_text(f), **_elements(M, x), "bottom": x == 0, "top": x == M.algebra.lattice.top}
        label = "bottom" if x == 0 else "top" if res["top"] else f"element {res['element']}"
        return _emit(res, as_json, label)
    if isinstance(M, IntKripkeModel) and any(a != b for a, b in M.order):
        C = upset_algebra(M)
        x = eval_algebraic(C, f, events)
        ext = set(iter_bits(x))
    else:
        ext = set(truth_set(M, f, events))
    if state is not None:
        s = M.state_index(state)
        res = {"formula": to_text(f), "state": state, "holds": s in ext}
        return _emit(res, as_json, "true" if s in ext else "false")
    names = _states(M, ext)
    res = {"formula": to_text(f), "states": names, "bottom": not names}
    _emit(res, as_json, "{" + ", ".join(names) + "}" + ("  (bottom)" if not names else ""))


def _ape_update_json(U) -> dict:
    A = U.algebra
    return {"algebra": eha_to_json(A),
            "measures": [measure_to_json(_tabulate(A, U.structure.measure(i)), A) for i in A.agents],
            "valuation": {p: A.lattice.index(x) for p, x in sorted(U.valuation.items())},
            "points": [{"event": U.event.events[k // U.product.m], "base_point": k % U.product.m}
                       for k in iter_bits(U.prebar)]}


def _tabulate(A, m) -> TableMeasure:
    from .measures import domain
    return TableMeasure(m.agent, {x: m.value(x) for x in domain(A, m.agent)})


@main.command("update")
@click.option("--model", "model_file", required=True, type=click.Path())
@click.option("--event", "event_file", required=True, type=click.Path())
@click.option("--int", "intuitionistic", is_flag=True, help="Intuitionistic update of an ordered model.")
@click.option("--with", "extra_events", multiple=True, type=click.Path(),
              help="Further event structures referenced by formulas.")
@json_option
@_guard
def update_cmd(model_file, event_file, intuitionistic, extra_events, as_json):
    """Product update of a model by an event structure."""
    M = io.load_model(model_file)
    E = io.event_from_json(io.load_json(event_file))
    events = io.load_events(extra_events)
    events[E.name] = E
    if isinstance(M, APEModel):
        U = update_model(M, E, events)
        return _emit(_ape_update_json(U), True)
    if intuitionistic:
        if not isinstance(M, IntKripkeModel):
            M = IntKripkeModel.discrete(M)
        U = int_update(M, E)
    else:
        if isinstance(M, IntKripkeModel) and any(a != b for a, b in M.order):
            raise InputError("the model has an order; use --int")
        _, U = classical_update(M, E, events)
    out = io.model_to_json(U)
    if as_json:
        return _emit(out, True)
    lines = []
    for i, v in U.agents.items():
        lines.append(f"agent {i}")
        for c in v.partition:
            lines.append("  " + "  ".join(f"{U.states[s]}={v.P[s]}" for s in sorted(c)))
    for p, ext in sorted(U.valuation.items()):
        lines.append(f"{p}: {{{', '.join(_states(U, ext))}}}")
    click.echo("\n".join(lines))


@main.command("rewrite")
@click.option("--formula", "text", required=True)
@click.option("--trace", is_flag=True, help="Also list the axiom applications.")
@events_option
@json_option
@_guard
def rewrite_cmd(text, trace, event_files, as_json):
    """Reduce a formula to one without dynamic operators."""
    f = io.formula(text, "--formula")
    events = io.load_events(event_files)
    out, steps = rewrite_with_trace(f, events)
    if as_json:
        res = {"input": to_text(f), "output": to_text(out)}
        if trace:
            res["trace"] = steps
        return _emit(res, True)
    if trace:
        for st in steps:
            click.echo(f"{st['axiom']}: {st['before']}  =>  {st['after']}")
    click.echo(to_text(out))


@main.command("check")
@click.option("--suite", type=click.Choice(sorted(SUITES)), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=None, help="Number of random instances.")
@json_option
@_guard
def check_cmd(suite, seed, count, as_json):
    """Run a randomised check suite."""
    kwargs = {"seed": seed}
    if count is not None:
        kwargs["count"] = count
    res = SUITES[suite](**kwargs)
    _emit(res, as_json, f"{res['passed']}/{res['count']} ok")
    if not as_json and res["failures"]:
        click.echo(io.dump(res["failures"]), err=True)
    if not res["ok"]:
        sys.exit(1)


@main.command("synthesize")
@click.option("--algebra", "algebra_file", required=True, type=click.Path())
@click.option("--pattern", "pattern_file", required=True, type=click.Path())
@json_option
@_guard
def synthesize_cmd(algebra_file, pattern_file, as_json):
    """Strict measures on an algebra realising a sign pattern."""
    A = io.algebra_from_json(io.load_json(algebra_file))
    pats, val = io.patterns_from_json(io.load_json(pattern_file))
    els = A.lattice.elements
    try:
        valuation = {p: els[int(k)] for p, k in val.items()}
    except (IndexError, ValueError):
        raise InputError("pattern valuation entries must be element indices") from None
    S = synthesize_measures(A, pats, valuation)
    out = [measure_to_json(S.measure(i), A) for i in sorted(A.agents)]
    if as_json:
        return _emit({"measures": out}, True)
    for m in out:
        click.echo(f"agent {m['agent']}")
        for k, v in m["values"].items():
            click.echo(f"  {k}: {v}")


@main.command("demo-art")
@click.option("--places", type=int, default=3, show_default=True, help="Decimals shown.")
@json_option
def demo_art_cmd(places, as_json):
    """The art-investor example end to end."""
    report = demo_art(places)
    if as_json:
        click.echo(json.dumps(report, indent=2))
    else:
        click.echo(render_demo(report))


if __name__ == "__main__":  # pragma: no cover
    main()
