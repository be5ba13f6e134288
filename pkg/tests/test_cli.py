import json
import subprocess
import sys
from importlib import resources

import pytest

from invpenrose import cli, suites

DATA = resources.files("invpenrose") / "data"


def data(name: str) -> str:
    return str(DATA / name)


def run(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "invpenrose", *args], capture_output=True, text=True, cwd=cwd
    )


def test_parse_chart():
    assert cli.parse_chart("", 3, 0) == ()
    assert cli.parse_chart("empty", 3, 0) == ()
    assert cli.parse_chart("1,2", 3, 0) == (1, 2)
    assert cli.parse_chart(None, 3, 1) == (1,)
    for bad in ("2,1", "1,1", "0", "x", "4"):
        with pytest.raises(cli.UsageError):
            cli.parse_chart(bad, 3, 1)
    with pytest.raises(cli.UsageError):
        cli.parse_chart("1", 3, 0)


def test_verify_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--suite", "localdeliv", "--n", "2", "--seed", "5", "--out", str(a)]) == 0
    assert cli.main(["verify", "--suite", "localdeliv", "--n", "2", "--seed", "5", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["ok"] and doc["failed"] == 0 and "wall_time" not in a.read_text()


def test_parallel_report_matches_serial():
    r1 = suites.run_suite("reduction", 3, seed=2, jobs=1)
    r2 = suites.run_suite("reduction", 3, seed=2, jobs=2)
    assert r1.to_json() == r2.to_json()


def test_usage_errors(tmp_path, capsys):
    assert cli.main(["verify", "--suite", "quadrics", "--n", "7"]) == 2
    assert cli.main(["verify", "--suite", "quadrics", "--n", "2", "--max-degree", "9"]) == 2
    assert cli.main(["build-qm", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["dirac", str(bad)]) == 2
    assert cli.main(["build-qm", data("solution_n2_m1.json"), "--chart", "1"]) == 2
    assert cli.main(["solutions", "--n", "5", "--m", "0", "--parity", "+", "--degree", "1"]) == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "nope", "--n", "2"])
    assert exc.value.code == 2


def test_pipeline_solution_and_non_solution(tmp_path):
    q = tmp_path / "q.json"
    assert cli.main(["build-qm", data("solution_n2_m1.json"), "--out", str(q)]) == 0
    assert cli.main(["check-dbar", str(q)]) == 0
    q2 = tmp_path / "q2.json"
    assert cli.main(["build-qm", data("non_solution_n2_m1.json"), "--out", str(q2)]) == 0
    res = tmp_path / "res.json"
    assert cli.main(["check-dbar", str(q2), "--residual", str(res)]) == 1
    assert json.loads(res.read_text())["terms"]


def test_odd_chart_pipeline(tmp_path):
    q = tmp_path / "q.json"
    assert cli.main(["build-qm", data("harmonic_n3_m0_odd.json"), "--chart", "3", "--out", str(q)]) == 0
    assert json.loads(q.read_text())["base"] == [3]
    assert cli.main(["check-dbar", str(q)]) == 0


def test_check_dbar_rejects_impure_type(tmp_path):
    doc = {
        "kind": "twisted_form", "n": 2, "parity": "+", "base": [], "charge": 0,
        "terms": [{"covectors": ["dw12"], "npow": 0, "poly": [{"exps": {}, "re": "1", "im": "0"}]}],
    }
    p = tmp_path / "f.json"
    p.write_text(json.dumps(doc))
    assert cli.main(["check-dbar", str(p)]) == 2
    doc["terms"] = []
    p.write_text(json.dumps(doc))
    assert cli.main(["check-dbar", str(p)]) == 0


def test_dirac_exit_codes(tmp_path, capsys):
    assert cli.main(["dirac", data("solution_n2_m1.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["operator"] == "dirac" and out["zero"] and out["components"] == []
    assert cli.main(["dirac", data("non_solution_n2_m1.json")]) == 1
    assert not json.loads(capsys.readouterr().out)["zero"]
    assert cli.main(["dirac", data("harmonic_n3_m0_odd.json")]) == 0
    assert json.loads(capsys.readouterr().out)["operator"] == "laplacian"


def test_build_qm_formats(capsys):
    assert cli.main(["build-qm", data("constant_n2_m0.json"), "--format", "text"]) == 0
    cap = capsys.readouterr()
    assert "dwb12: (1) / N^2" in cap.out
    assert cap.err.startswith("terms=1 monomials=1")
    assert cli.main(["build-qm", data("constant_n2_m0.json"), "--format", "latex"]) == 0
    assert "\\frac{1}{N^{2}}\\, d\\bar w_{12}" in capsys.readouterr().out


def test_solutions_command(capsys):
    assert cli.main(["solutions", "--n", "2", "--m", "0", "--parity", "+", "--degree", "2"]) == 0
    cap = capsys.readouterr()
    doc = json.loads(cap.out)
    assert doc["dimension"] == 14 == len(doc["fields"])
    assert "dimension=14" in cap.err


def test_module_entry_point():
    r = run("dirac", data("solution_n2_m1.json"))
    assert r.returncode == 0 and json.loads(r.stdout)["zero"]
    r = run("verify", "--suite", "bogus", "--n", "2")
    assert r.returncode == 2
