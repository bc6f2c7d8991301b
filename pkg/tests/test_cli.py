from __future__ import annotations

import json

import pytest

from enriques_lattice.cli import main, parse_element, parse_vector, run_verification
from enriques_lattice.model import label, model_to_dict


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_vector(model):
    assert parse_vector("G4", model) == model.classes[label("G4")]
    assert parse_vector("E4 + 2*G4", model) == tuple(a + 2 * b for a, b in
                                                     zip(model.classes[label("E4")], model.classes[label("G4")]))
    assert parse_vector("1,0,0,0,0,0,0,0,0,1/2", model)[-1] == parse_vector("1,0,0,0,0,0,0,0,0,0.5", model)[-1]
    with pytest.raises(ValueError):
        parse_vector("1,2", model)
    with pytest.raises(ValueError):
        parse_vector("E1 E2", model)


def test_parse_element():
    assert str(parse_element("(1 2) . s1 s2")) == "(1 2) . s1 s2"
    assert str(parse_element("s1 s1")) == "id . 1"


def test_classify_curve_g4(capsys):
    code, out, _ = run(capsys, "classify", "curve", "G4", "--json")
    assert code == 0
    assert json.loads(out)["verdict"] == "NotInCurveOrbit"


def test_classify_pencil_hexagon(capsys):
    code, out, _ = run(capsys, "classify", "pencil", "E1+E12+E2+E23+E3+E13", "--json")
    data = json.loads(out)
    assert code == 0 and data["type_index"] == 5 and data["mw_rank"] == 0
    assert data["fibers"][0] == {"type": "A5~", "multiple": True}


def test_exit_codes(capsys):
    assert run(capsys, "classify", "curve", "1,2")[0] == 2
    assert run(capsys, "classify", "curve", "H")[0] == 3
    assert run(capsys, "classify", "pencil", "3*E1+3*E12+3*E2+3*E23+3*E3+3*E13")[0] == 3
    assert run(capsys, "group", "mul", "s9")[0] == 2


def test_verify_json_is_deterministic(capsys):
    code1, out1, _ = run(capsys, "verify", "--json", "--max-degree", "2")
    code2, out2, _ = run(capsys, "verify", "--json", "--max-degree", "2")
    assert out1 == out2 and code1 == code2
    names = [s["name"] for s in json.loads(out1)["sections"]]
    assert names[0] == "model tables" and names[-1] == "bounded enumeration cross-checks"


def test_verify_census_line(capsys):
    _, out, _ = run(capsys, "verify", "--max-degree", "2")
    assert "E7~+A1~: 12" in out


def test_verify_bundled_model_passes(model):
    rep = run_verification(model, max_degree=2)
    failing = [s.name for s in rep.sections if not s.passed]
    assert failing == [], failing
    assert rep.exit_status == 0


def test_verify_detects_corrupted_gram(tmp_path, capsys, model):
    data = model_to_dict(model)
    data["gram20"][10][11] = data["gram20"][11][10] = 0
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", "--json", "--model", str(path), "--max-degree", "2")
    assert code == 1
    status = {s["name"]: s["status"] for s in json.loads(out)["sections"]}
    assert status["model tables"] == "fail"


def test_other_subcommands(capsys):
    code, out, _ = run(capsys, "gram", "--json")
    assert code == 0 and len(json.loads(out)["gram"]) == 20
    code, out, _ = run(capsys, "parabolics", "--json")
    assert json.loads(out)["count"] == 29
    code, out, _ = run(capsys, "automorphisms", "--json")
    assert json.loads(out)["order"] == 24
    code, out, _ = run(capsys, "reduce", "E4+2*G4", "--json")
    assert json.loads(out)["word"] == ["s4"]
    code, out, _ = run(capsys, "enumerate", "--norm", "-2", "--max-degree", "1", "--json")
    assert json.loads(out)["count"] > 4
    code, out, _ = run(capsys, "ball", "--max-word-len", "1", "--json")
    assert code == 0 and json.loads(out)["vertices"] == 32
    code, out, _ = run(capsys, "group", "faithfulness", "--max-word-len", "3")
    assert code == 0
    code, out, _ = run(capsys, "group", "isometry", "s4", "--json")
    assert len(json.loads(out)["matrix"]) == 10


def test_report_writes_figures(tmp_path, capsys):
    code, _, _ = run(capsys, "report", "--out", str(tmp_path), "--max-degree", "2", "--max-word-len", "2")
    assert code == 0
    for name in ("verify.json", "pencil_types.csv", "parabolics.csv", "ball_growth.csv",
                 "coxeter_diagram.png", "parabolic_census.png", "ball_growth.png"):
        assert (tmp_path / name).stat().st_size > 0
    header = (tmp_path / "pencil_types.csv").read_text().splitlines()[0]
    assert header == "type,singular_fibers,mw_rank,count"
