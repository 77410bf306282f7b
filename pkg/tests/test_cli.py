import json
import random
from importlib import resources

import pytest
from click.testing import CliRunner

from pdel import generators as g
from pdel import io
from pdel.cli import main

DATA = resources.files("pdel") / "data"
MODEL = str(DATA / "art_model.json")
EVENT = str(DATA / "art_event.json")
SQUARE = {"n": 4, "leq": [[0, 1], [0, 2], [1, 3], [2, 3]],
          "agents": {"i": {"diamond": [0, 3, 3, 3], "box": [0, 0, 0, 3]}}}


def run(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_demo_art():
    r = run("demo-art")
    assert r.exit_code == 0
    for value in ("0.596", "0.397", "0.007", "0.324", "0.540", "0.070", "0.006", "0.048", "0.012"):
        assert value in r.output
    data = json.loads(run("demo-art", "--json").output)
    assert [x["exact"] for x in data["submodel"]] == ["60/151", "90/151", "1/151"]


def test_rewrite_box_true():
    r = run("rewrite", "--formula", "[Ev,e1] true")
    assert r.exit_code == 0
    assert r.output.strip() == "true"


def test_rewrite_trace_json():
    r = run("rewrite", "--formula", "[Art,e1] (p & exhibit)", "--event", EVENT, "--trace", "--json")
    data = json.loads(r.output)
    assert data["output"] == "(true | p | ~p -> p) & (true | p | ~p -> true)"
    assert [t["axiom"] for t in data["trace"]] == ["I7", "I1", "I1"]


def test_eval_false_is_bottom():
    r = run("eval", "--model", MODEL, "--formula", "false")
    assert r.exit_code == 0
    assert "bottom" in r.output


def test_eval_at_state():
    assert run("eval", "--model", MODEL, "--formula", "p", "--state", "s1").output.strip() == "true"
    assert run("eval", "--model", MODEL, "--formula", "p | ~p", "--state", "s0").output.strip() == "false"


def test_eval_dynamic():
    r = run("eval", "--model", MODEL, "--formula", "<Art,e1> exhibit", "--event", EVENT, "--json")
    assert json.loads(r.output)["states"] == ["s0", "s1", "s2"]


def test_eval_ape_model(tmp_path):
    M = g.ape_model(random.Random(2))
    path = write(tmp_path, "ape.json", io.ape_to_json(M))
    r = run("eval", "--model", path, "--formula", "p -> p")
    assert r.exit_code == 0 and r.output.strip() == "top"


def test_update_int():
    r = run("update", "--model", MODEL, "--event", EVENT, "--int", "--json")
    assert r.exit_code == 0
    data = json.loads(r.output)
    assert data["agents"]["i"]["P"]["(s1,e1)"] == "90/151"
    assert data["valuation"]["apply"] == ["(s0,e1)", "(s0,e2)", "(s1,e1)", "(s1,e2)", "(s2,e1)", "(s2,e2)"]


def test_update_ordered_model_needs_int():
    r = run("update", "--model", MODEL, "--event", EVENT)
    assert r.exit_code == 2


def test_update_classical(tmp_path):
    M, E = g.classical_pair(random.Random(3))
    m = write(tmp_path, "m.json", io.model_to_json(M))
    e = write(tmp_path, "e.json", io.event_to_json(E))
    r = run("update", "--model", m, "--event", e)
    assert r.exit_code == 0 and r.output.startswith("agent")


def test_check_suite():
    r = run("check", "--suite", "duality", "--seed", 7, "--count", 20)
    assert r.exit_code == 0
    assert r.output.strip() == "20/20 ok"


def test_synthesize(tmp_path):
    alg = write(tmp_path, "a.json", SQUARE)
    pat = write(tmp_path, "p.json", {"patterns": [{"agent": "i", "atoms": [
        {"formula": "pr[i](1*mu(p) >= 3/5)", "cells": {"0": 1}}]}], "valuation": {"p": 1}})
    r = run("synthesize", "--algebra", alg, "--pattern", pat, "--json")
    assert r.exit_code == 0
    values = json.loads(r.output)["measures"][0]["values"]
    assert values["3"] == "1"
    assert io.rational(values["1"]) >= io.rational("3/5")


def test_synthesize_infeasible(tmp_path):
    alg = write(tmp_path, "a.json", SQUARE)
    pat = write(tmp_path, "p.json", {"patterns": [{"agent": "i", "atoms": [
        {"formula": "pr[i](mu(p) >= 3/5)", "cells": {"0": 1}},
        {"formula": "pr[i](mu(p) >= 1/2)", "cells": {"0": 0}}]}], "valuation": {"p": 1}})
    r = run("synthesize", "--algebra", alg, "--pattern", pat, "--json")
    assert r.exit_code == 3
    assert json.loads(r.output)["error"] == "Infeasible"


@pytest.mark.parametrize("args", [
    ("eval", "--model", "/nonexistent.json", "--formula", "p"),
    ("eval", "--model", MODEL, "--formula", "p &"),
    ("rewrite", "--formula", "pr[i](mu(p) = 1)"),
])
def test_input_errors_exit_2(args):
    assert run(*args).exit_code == 2


def test_invalid_model_exits_1(tmp_path):
    bad = write(tmp_path, "m.json", {"states": ["u"], "agents": {"i": {"partition": [["u"]], "P": {"u": "1/2"}}},
                                     "valuation": {}})
    assert run("eval", "--model", bad, "--formula", "true").exit_code == 1


def test_json_roundtrips(tmp_path):
    M, E = g.classical_pair(random.Random(5))
    assert io.model_from_json(io.model_to_json(M)) == M
    E2 = io.event_from_json(io.event_to_json(E))
    assert (E2.phi, E2.pre, E2.sub, E2.order) == (E.phi, E.pre, E.sub, E.order)
    A = g.ape_model(random.Random(5))
    B = io.ape_from_json(json.loads(io.dump(io.ape_to_json(A))))
    assert io.ape_to_json(B) == io.ape_to_json(A)


def test_version():
    r = run("--version")
    assert r.exit_code == 0
