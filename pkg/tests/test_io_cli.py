import json

import pytest
from hypothesis import given, settings

from feynpoly.canon import canonical_key
from feynpoly.cli import main
from feynpoly.errors import InvalidGraph, ParseError
from feynpoly.io import (
    emit_graph_json,
    emit_graph_text,
    kinpoint_from_dict,
    kinpoint_to_dict,
    load_kinpoint,
    parse_graph,
)
from feynpoly.symanzik import KinPoint

from strategies import graphs

DUNCE_TEXT = """# dunce cap
vertices 3
momenta 2
masses 1
edge 1 2 m1
edge 1 3
edge 3 2
edge 3 2
leg 1 q1
leg 2 q2
"""


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


@settings(max_examples=40, deadline=None)
@given(graphs())
def test_graph_round_trips(g):
    for emit in (emit_graph_json, emit_graph_text):
        h = parse_graph(emit(g))
        assert canonical_key(h) == canonical_key(g)
        assert (h.nq, h.nm) == (g.nq, g.nm)


def test_text_and_json_agree(dunce):
    assert canonical_key(parse_graph(DUNCE_TEXT)) == canonical_key(dunce)
    assert parse_graph(emit_graph_json(dunce)).edges == dunce.edges


@pytest.mark.parametrize("text, line, column", [
    ("vertices 2\nedge 1 x\n", 2, 8),
    ("vertices 2\nedge 1 2 q1\n", 2, 10),
    ("vertices 2\nlegg 1 q1\n", 2, 1),
    ('{"vertices": 2,\n "edges": [[1, 2]', 2, 18),
])
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_graph(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}" in str(info.value)


def test_invalid_graphs():
    with pytest.raises(ParseError):
        parse_graph("edge 1 2\n")
    with pytest.raises(InvalidGraph):
        parse_graph("vertices 2\nedge 1 3\n")
    with pytest.raises(InvalidGraph):
        parse_graph("vertices 4\nedge 1 2\nedge 3 4\nleg 1 q1\nleg 3 q2\n")


def test_kinpoint_round_trip():
    p = KinPoint(3, 2, {(1, 1): 1.5, (1, 2): complex(0.5, -1.0), (2, 2): 2.0}, {1: 1.0, 2: 0.25})
    q = kinpoint_from_dict(json.loads(json.dumps(kinpoint_to_dict(p))))
    assert q == p
    assert load_kinpoint(json.dumps(kinpoint_to_dict(p))) == p
    with pytest.raises(ParseError):
        load_kinpoint('{"s": {"1;1": 1}}')
    with pytest.raises(ParseError):
        load_kinpoint("{bad")


def test_poly_command(capsys, tmp_path):
    f = tmp_path / "dunce.txt"
    f.write_text(DUNCE_TEXT)
    code, doc = run(capsys, "poly", str(f))
    assert code == 0 and doc["schema"] == "feynpoly/1" and doc["command"] == "poly"
    assert doc["result"]["loops"] == 2
    code, doc2 = run(capsys, "poly", str(f), "--method", "kirchhoff")
    assert doc2["result"]["psi"] == doc["result"]["psi"]


def test_motic_and_coproduct(capsys):
    code, doc = run(capsys, "motic", "builtin:dunce")
    assert code == 0 and doc["result"]["count"] == 6
    code, doc = run(capsys, "coproduct", "builtin:banana3", "--reduced", "--antipode")
    assert code == 0
    assert doc["result"]["coradical_degree"] == 2
    assert "reduced_coproduct" in doc["result"] and "antipode" in doc["result"]


def test_factor_check(capsys):
    code, doc = run(capsys, "factor-check", "builtin:dunce")
    assert code == 0 and doc["result"]["ok"] and doc["result"]["subsets"] == 16
    code, doc = run(capsys, "factor-check", "builtin:dunce", "--gamma", "3,4")
    assert code == 0 and all(r["holds"] for r in doc["result"]["rows"])
    code, doc = run(capsys, "factor-check", "builtin:dunce", "--gamma", "3;4")
    assert code == 2


def test_atlas_command(capsys):
    code, doc = run(capsys, "atlas", "builtin:massive-triangle", "--ring")
    res = doc["result"]
    assert code == 0 and len(res["charts"]) == 4
    assert res["incidence_matches_charts"] and res["affine_ring"]["ok"]


def test_converge_command(capsys):
    code, doc = run(capsys, "converge", "builtin:dunce", "-d", "6")
    assert code == 0 and doc["result"]["convergent"] is False
    code, doc = run(capsys, "converge", "builtin:dunce", "-d", "5")
    assert code == 3 and doc["error"]["type"] == "OddDimension"


def test_integrate_command(capsys):
    point = '{"s": {"1,1": 1.0}, "msq": {"1": 1.0}}'
    code, doc = run(capsys, "integrate", "builtin:bubble", "-d", "2", "--point", point, "--per-sector")
    res = doc["result"]
    assert code == 0 and abs(res["value"] - 0.8608178819280081) < 1e-6
    assert res["sectors"] == 2 and len(res["per_sector"]) == 2 and res["samples"] > 0
    code, doc = run(capsys, "integrate", "builtin:banana3", "--numerator", "a1*a2*a3", "--A", "3")
    assert code == 0 and abs(doc["result"]["value"] - 0.5) < 1e-6
    code, doc = run(capsys, "integrate", "builtin:bubble", "-d", "2", "--point",
                    '{"s": {"1,1": -1.0}, "msq": {"1": 1.0}}')
    assert code == 3 and doc["error"]["type"] == "NonGenericPoint"
    code, doc = run(capsys, "integrate", "builtin:w3", "--rtol", "1e-9", "--max-samples", "4000")
    assert code == 4 and doc["error"]["type"] == "BudgetExceeded"
    code, doc = run(capsys, "integrate", "builtin:banana3", "--numerator", "a1*(", "--A", "3")
    assert code == 2


def test_strata_command(capsys):
    code, doc = run(capsys, "strata", "builtin:massive-triangle", "--degree", "1")
    res = doc["result"]
    assert code == 0 and res["max_chain_length"] == 1
    assert len(res["chains"]) == 2 and len(res["descendants"]) == 9 and len(res["face_maps"]) == 4


def test_selfcheck_command(capsys):
    code, doc = run(capsys, "selfcheck", "--quick")
    assert code == 0 and doc["result"]["ok"]


def test_parse_failures_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("vertices 2\nedge 1 x\n")
    code, doc = run(capsys, "poly", str(bad))
    assert code == 2 and doc["error"]["type"] == "ParseError"
    code, doc = run(capsys, "poly", str(tmp_path / "missing.txt"))
    assert code == 2
    code, doc = run(capsys, "poly", "builtin:nosuch")
    assert code == 2


def test_output_file(capsys, tmp_path):
    out = tmp_path / "res.json"
    assert main(["-o", str(out), "motic", "builtin:massive-triangle"]) == 0
    assert capsys.readouterr().out == ""
    doc = json.loads(out.read_text())
    assert doc["result"]["count"] == 2
    assert [p.name for p in tmp_path.iterdir()] == ["res.json"]
