import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from mpsx import cli
from mpsx.formats import load_mpsx, schema

DATA = Path(__file__).resolve().parent.parent / "demos" / "data"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, (json.loads(out) if out.strip() else None), err


@pytest.mark.parametrize("argv, code", [
    (["stability", DATA / "w.json"], 0),
    (["stability", DATA / "jordan.json"], 4),
    (["stability", DATA / "irrational_phase.json"], 4),
    (["ti", DATA / "chain-non-ti.json"], 5),
    (["gcf", DATA / "chain-non-ti.json"], 5),
    (["gcf", DATA / "irrational_phase.json"], 4),
    (["state", DATA / "w.json", "--n", "30", "--cap-state", "100"], 6),
    (["state", DATA / "missing.json", "--n", "2"], 2),
    (["rls", "|0* 1"], 2),
    (["rls", "|0* 1 0*> + |1*>"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_bad_input_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"d": 2, "D": 1, "matrices": [[[1, 0]]], "boundary": "identity"}')
    code, _, err = run(capsys, "analyze", bad)
    assert code == 2 and "error" in err
    bad.write_text('{"d": 1, "D": 1, "matrices": [[NaN]], "boundary": "identity"}')
    assert run(capsys, "analyze", bad)[0] == 2


def test_usage_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["state", str(DATA / "w.json")])
    assert exc.value.code == 2


def test_gcf_text(capsys):
    code, out, _ = run(capsys, "gcf", DATA / "w.json")
    assert code == 0
    assert "backbone: 1*S1|0* f 0*>(|1>)" in out.splitlines()
    assert "backbone (symbolic): b0*|0*> + b1*S1|0* f 0*>(|1>)" in out.splitlines()
    _, out, _ = run(capsys, "gcf", DATA / "ghz.json")
    assert "backbone: 1*|0*> + 1*|1*>" in out.splitlines()


def test_compare_text(capsys):
    _, out, _ = run(capsys, "compare", DATA / "w.json", DATA / "ghz.json")
    assert out.splitlines()[0] == "DIFFERENT (first distinguishing word: 00)"
    _, out, _ = run(capsys, "compare", DATA / "w.json", DATA / "gauged-w.json")
    assert out.splitlines()[0] == "EQUIVALENT"


def test_compare_relation(capsys):
    code, rep, _ = run_json(capsys, "compare", DATA / "w.json", DATA / "w.json", "--relation")
    assert code == 0 and rep["verdict"] == "EQUIVALENT"
    P = np.array([[complex(*z) for z in row] for row in rep["relation"]["P_B"]])
    assert np.allclose(P, np.eye(2))


def test_rls_state_lines(capsys):
    code, out, _ = run(capsys, "rls", "|0* 1 0*>", "--state", "3")
    assert code == 0
    assert out.splitlines()[:3] == ["001 1", "010 1", "100 1"]


def test_state_matches_rls(capsys):
    _, a, _ = run_json(capsys, "state", DATA / "w.json", "--n", "4")
    _, b, _ = run_json(capsys, "rls", "|0* 1 0*>", "--state", "4")
    assert a["amplitudes"] == b["amplitudes"]


def test_rls_to_mpsx(capsys, tmp_path):
    out = tmp_path / "w6.json"
    code, rep, _ = run_json(capsys, "rls", DATA / "two_sector.rls", "--param", "a24=2",
                            "--param", "a34=3", "--to-mpsx", out)
    assert code == 0 and rep["D"] == 6
    m = load_mpsx(out)
    assert m.X[2, 0] == 2 and m.X[5, 3] == 3
    assert run(capsys, "rls", DATA / "two_sector.rls", "--to-mpsx", out)[0] == 2  # unbound


def test_check_gamma(capsys):
    expr = "|0* 1 0* 1 0*>"
    _, out, _ = run(capsys, "rls", expr, "--check-gamma", DATA / "g01.json", "1", "1")
    assert "INVARIANT" in out.splitlines()
    _, out, _ = run(capsys, "rls", expr, "--check-gamma", DATA / "g012.json", "2", "2")
    assert "NOT INVARIANT" in out.splitlines()


@pytest.mark.parametrize("name", ["w.json", "ghz.json", "jordan.json"])
def test_report_round_trip(capsys, tmp_path, name):
    code, rep, _ = run_json(capsys, "analyze", DATA / name)
    jsonschema.validate(rep, schema("report"))
    path = tmp_path / "rep.json"
    path.write_text(json.dumps(rep))
    code2, rep2, _ = run_json(capsys, "analyze", "--from-report", path)
    assert code2 == 0 and rep2 == rep


@pytest.mark.parametrize("argv", [
    ["gcf", DATA / "w.json"],
    ["stability", DATA / "irrational_phase.json"],
    ["ti", DATA / "chain-non-ti.json"],
    ["compare", DATA / "w.json", DATA / "ghz.json"],
    ["rls", "|0* 1 0*>", "--state", "3"],
])
def test_reports_follow_schema(capsys, argv):
    _, rep, _ = run_json(capsys, *argv)
    jsonschema.validate(rep, schema("report"))


@pytest.mark.parametrize("name", sorted(p.name for p in DATA.glob("*.json")))
def test_data_files_follow_schema(name):
    doc = json.loads((DATA / name).read_text())
    kind = "gamma" if name.startswith("g0") else "mpsx_file"
    jsonschema.validate(doc, schema(kind))
