from __future__ import annotations

import io
import json

import pytest

from clusterfibre.cli import CliConfig, main, run
from clusterfibre.fibre_graph import FibreGraph, to_json


def call(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_kodaira_type_iv(capsys):
    code, out, _ = call(["kodaira", "--dsl", "(x^3-p^2)"], capsys)
    assert code == 0 and out.strip() == "IV"


def test_model_ascii_contains_chain(capsys):
    code, out, _ = call(["model", "--dsl", "(x^3-p^2)*(x^4-p^11)", "--out", "ascii"], capsys)
    assert code == 0
    assert out.count("1-1-2-3") == 2


@pytest.mark.parametrize("fmt", ["json", "dot", "ascii"])
def test_model_formats_are_deterministic(fmt, capsys):
    argv = ["model", "--dsl", "((x^3-p)^3-p^15)((x-1)^4-p^9)", "--out", fmt]
    first = call(argv, capsys)
    second = call(argv, capsys)
    assert first == second and first[0] == 0
    if fmt == "json":
        assert "components" in json.loads(first[1])


def test_invariants_table_and_json(capsys):
    code, out, _ = call(["invariants", "--dsl", "(x^3-p^2)(x^4-p^11)"], capsys)
    assert code == 0 and out.splitlines()[-1] == "genus 3"
    code, out, _ = call(["invariants", "--dsl", "(x^3-p^2)(x^4-p^11)", "--out", "json"], capsys)
    assert json.loads(out)["genus"] == 3


def test_picture_json_file(tmp_path, capsys):
    doc = {"leading_val": 0, "root": {"depth": "1/3", "children": [{}, {}, {}]}}
    path = tmp_path / "pic.json"
    path.write_text(json.dumps(doc))
    code, out, err = call(["kodaira", str(path)], capsys)
    assert (code, out.strip()) == (0, "II"), err


def planted_minus_one() -> FibreGraph:
    # type IV with the point where the centre meets one tail blown up
    g = FibreGraph()
    c = g.add_component(3, 0)
    for _ in range(2):
        g.add_edge(c, g.add_component(1, 0, "tail"))
    e = g.add_component(4, 0, "chain")
    g.add_edge(c, e)
    g.add_edge(e, g.add_component(1, 0, "tail"))
    return g


def test_check_planted_curve_exits_one(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(to_json(planted_minus_one())))
    code, _, err = call(["check", str(path)], capsys)
    assert code == 1
    assert "exceptional curve" in err and "-1" in err


def test_check_good_model(capsys):
    code, out, _ = call(["check", "--input", "dsl", "--dsl", "(x^3-p)((x^3-p^4)^2-p^9)"], capsys)
    assert code == 0 and out.startswith("ok:")


@pytest.mark.parametrize(
    "argv",
    [
        ["kodaira", "--dsl", "(x^3-p^2-"],
        ["model", "/nonexistent/file.json"],
        ["model"],
        ["kodaira", "--dsl", "(x^5-p)"],
        ["oracle", "--method", "assembler", "--dsl", "(x^3-p)"],
    ],
)
def test_input_errors_exit_two(argv, capsys):
    code, _, err = call(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_bad_json_exits_two(tmp_path, capsys):
    path = tmp_path / "x.json"
    path.write_text("{not json")
    assert call(["check", str(path)], capsys)[0] == 2


def test_source_and_dsl_conflict():
    err = io.StringIO()
    cfg = CliConfig("model", "a.json", "(x^3-p)", "json", "ascii", "assembler", False)
    assert run(cfg, io.StringIO(), err) == 2


@pytest.mark.parametrize("method", ["newton", "reroot", "semistable"])
def test_oracles_agree(method, capsys):
    dsl = {"newton": "(x^3-p^2)(x^4-p^11)", "reroot": "x(x^2-p)((x-1)^3-p^2)", "semistable": "(x-1)(x-2)(x-3)(x-4)(x^2-p^2)"}[method]
    code, out, err = call(["oracle", "--method", method, "--dsl", dsl], capsys)
    assert code == 0, out + err
    assert out.startswith(f"{method}: agree")


def test_golden_oracle(capsys):
    code, out, _ = call(["oracle", "--method", "golden"], capsys)
    assert code == 0
    assert "FAIL" not in out and len(out.splitlines()) == 24
