import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from mvsubalg.cli import main, run

SCHEMA = json.loads(resources.files("mvsubalg").joinpath("report_schema.json").read_text())
PAIR = ["x1 . x1", "~(x1+x1)"]


def ok(report):
    jsonschema.validate(report, SCHEMA)
    return report


@pytest.fixture
def complex_file(tmp_path):
    p = tmp_path / "cx.json"
    p.write_text(json.dumps({"dim": 1, "simplexes": [[["0"], ["2/3"]], [["2/3"], ["1"]]]}))
    return str(p)


@pytest.mark.parametrize("argv, verdict", [
    (["separation", "-n", "1", *PAIR], True),
    (["separation", "-n", "1", "x1+x1"], False),
    (["iso-free", "-n", "1", *PAIR], False),
    (["free-sep", "-n", "2", "x1", "x2"], True),
    (["equals-free", "-n", "1", *PAIR], False),
    (["equals-free", "-n", "1", "~x1"], True),
    (["equal-subalg", "-n", "1", *PAIR, "--other", "x1"], False),
    (["equal-subalg", "-n", "1", "x1", "--other", "~x1"], True),
    (["embed-check", "-n", "1", "0"], True),
    (["embed-check", "-n", "1", "x1 /\\ ~x1"], False),
])
def test_decisions(argv, verdict):
    code, report = run(argv)
    assert code == 0
    assert ok(report)["verdict"] is verdict
    assert (report["witness"] is None) == verdict


def test_separation_witness_is_reported():
    _, report = run(["separation", "-n", "1", "x1+x1"])
    w = report["witness"]
    assert (w["x"], w["y"], w["image"]) == (["1/2"], ["1"], ["1"])


def test_iso_witness_is_reported():
    _, report = run(["iso-free", "-n", "1", *PAIR])
    assert report["witness"] == {"kind": "denominator drop", "vertex": ["1/2"],
                                 "image": ["0", "0"], "den_vertex": 2, "den_image": 1}


def test_equality_witness_is_reported():
    _, report = run(["equal-subalg", "-n", "1", *PAIR, "--other", "x1"])
    w = report["witness"]
    assert w["vertex"] == ["1/2"] and w["value"] == "1/2" and w["hat_value"] == "1"


@pytest.mark.parametrize("argv", [
    ["parse", "-n", "2", "x1 . x2 -> ~x1"],
    ["compile", "-n", "1", "x1+x1"],
    ["basis", "-n", "1", *PAIR],
    ["to-quotient", "-n", "1", *PAIR],
    ["synth", "-n", "1", "x1 /\\ ~x1"],
])
def test_constructions(argv):
    code, report = run(argv)
    assert code == 0 and ok(report)["verdict"] is None and "result" in report


def test_parse_output():
    _, report = run(["parse", "-n", "1", "x1 . x1"])
    assert report["result"]["terms"] == [{"printed": "(x1.x1)", "desugared": "~(~x1+~x1)"}]


def test_basis_output():
    _, report = run(["basis", "-n", "1", *PAIR])
    r = report["result"]
    assert r["weighted_triangulation"]["weights"] == [1, 2, 1]
    assert r["multipliers"] == [1, 1, 1]
    assert r["is_basic"] and r["unit_partition"] and r["generates_same"]


def test_desingularize_command(complex_file):
    code, report = run(["desingularize", "--complex-file", complex_file])
    assert code == 0 and ok(report)
    assert report["result"]["log"]
    verts = {tuple(v) for s in report["result"]["complex"]["simplexes"] for v in s}
    assert ("2/3",) in verts


def test_synth_from_file(tmp_path):
    _, compiled = run(["compile", "-n", "1", "x1 . x1"])
    p = tmp_path / "f.json"
    p.write_text(json.dumps(compiled["result"]["functions"][0]))
    code, report = run(["synth", "--pwl-file", str(p)])
    assert code == 0 and report["result"]["term"] == "(x1.x1)"


def test_terms_file(tmp_path):
    p = tmp_path / "terms.txt"
    p.write_text("x1 . x1\n\n~(x1+x1)\n")
    code, report = run(["separation", "-n", "1", "--terms-file", str(p)])
    assert code == 0 and report["verdict"] is True


def test_precondition_exit_code():
    code, report = run(["iso-free", "-n", "1", "x1+x1"])
    assert code == 2 and ok(report)["error"]["kind"] == "precondition"
    code, _ = run(["basis", "-n", "1", "x1+x1"])
    assert code == 2


@pytest.mark.parametrize("argv, kind", [
    (["separation", "-n", "1", "x1 +"], "parse"),
    (["separation", "-n", "1", "x2"], "parse"),
    (["separation", "x1"], "input"),
    (["separation", "-n", "1"], "input"),
    (["separation", "-n", "1", "--terms-file", "/nonexistent/terms"], "input"),
    (["desingularize"], "input"),
    (["embed-check", "-n", "1", "x1", "x1"], "input"),
])
def test_input_errors(argv, kind):
    code, report = run(argv)
    assert code == 3 and ok(report)["error"]["kind"] == kind


def test_bad_json_input(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, report = run(["desingularize", "--complex-file", str(p)])
    assert code == 3 and ok(report)["error"]["kind"] == "input"


def test_usage_error():
    code, report = run(["no-such-command"])
    assert code == 3 and ok(report)["error"]["kind"] == "usage"


def test_timeout_exit_code():
    code, report = run(["basis", "-n", "1", *PAIR, "--timeout", "0"])
    assert code == 4 and ok(report)["error"]["kind"] == "timeout"


def test_json_out_and_artifacts(tmp_path):
    out = tmp_path / "report.json"
    art = tmp_path / "art"
    code, report = run(["basis", "-n", "1", *PAIR, "--json-out", str(out),
                        "--artifacts-dir", str(art)])
    assert code == 0
    assert json.loads(out.read_text()) == report
    assert set(report["artifacts"]) == {"weighted_triangulation", "range_triangulation"}
    for path in report["artifacts"].values():
        assert json.loads(open(path).read())["dim"] >= 1


def test_main_prints_deterministic_json(capsys):
    outs = []
    for _ in range(2):
        assert main(["to-quotient", "-n", "1", *PAIR]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert ok(json.loads(outs[0]))["problem"] == "to-quotient"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mvsubalg", "separation", "-n", "1", "x1+x1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] is False
