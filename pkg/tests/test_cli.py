import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from plumbswf.cli import main, run_atlas
from plumbswf.errors import ParseError, ValidationError
from plumbswf.formats import parse_input, parse_params, root_to_dot, root_to_svg
from plumbswf.plumbing import e8_graph, from_brieskorn, isomorphic
from plumbswf.roots import GradedRoot
from plumbswf.spectrum import SpectrumModel


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_parse_shorthand():
    assert isomorphic(parse_input("brieskorn:2,3,5"), e8_graph())
    g = parse_input("seifert:-1;(2,1),(3,1),(7,1)")
    assert isomorphic(g, from_brieskorn([2, 3, 7]))


def test_parse_errors():
    with pytest.raises(ParseError) as e:
        parse_input("brieskorn:2,4")
    assert "NotCoprime" in str(e.value) or "TooFewFibers" in str(e.value)
    with pytest.raises(ParseError) as e:
        parse_input("brieskorn:2,4,5")
    assert "NotCoprime" in str(e.value)
    with pytest.raises(ParseError) as e:
        parse_input("brieskorn:2,x,5")
    assert e.value.location == "brieskorn[1]"
    with pytest.raises(ParseError) as e:
        parse_input("seifert:-1;(2,1) junk (3,1)")
    with pytest.raises(ParseError) as e:
        parse_input('{"vertices": [{"id": 0, "framing": -2},\n {"id": 1}]}')
    assert e.value.location == "vertices[1]"
    with pytest.raises(ParseError) as e:
        parse_input('{"vertices": [{"id": 0, "framing": "x"}]}')
    assert e.value.location == "vertices[0].framing"
    with pytest.raises(ParseError) as e:
        parse_input('{"vertices": [\n  {"id": 0 "framing": -1}]}')
    assert e.value.location.startswith("line 2")


def test_json_graph_validation():
    with pytest.raises(ValidationError):
        parse_input('{"vertices": [{"id": 0, "framing": -2}], "edges": [[0, 1]]}')
    with pytest.raises(ValidationError):
        parse_input('{"vertices": [{"id": 1, "framing": -2}]}')
    g = from_brieskorn([2, 3, 7])
    assert parse_input(json.dumps(g.to_dict())) == g


def test_analyze_command():
    code, out, _ = run("analyze", "brieskorn:2,3,7")
    assert code == 0
    d = json.loads(out)
    assert d["kappa"] == 1 and d["mu_bar"] == "1" and d["projective"] == [1, "-2"]
    code2, out2, _ = run("analyze", "brieskorn:2,3,7")
    assert out2 == out


def test_analyze_with_class_flags():
    code, out, _ = run("analyze", "seifert:-2;(2,1),(3,1),(3,1)", "--class", "1", "--oracle")
    assert code == 0
    d = json.loads(out)
    assert d["kappa"] is None and d["spinc"]["self_conjugate"] is False
    code, _, err = run("analyze", "brieskorn:2,3,7", "--class", "0", "--char", "1,1,1,1")
    assert code == 2


def test_oracle_command():
    code, out, _ = run("oracle", "brieskorn:2,3,7", "--h", "-6")
    assert code == 0
    d = json.loads(out)
    assert d["H_1"] == []
    assert d["H_0"] == [{"len": "inf", "top": "0"}, {"len": 1, "top": "0"}]
    code, _, err = run("--json-errors", "oracle", "brieskorn:2,3,7", "--h", "-6", "--u-trunc", "1")
    assert code == 1
    assert json.loads(err)["error"] == "TruncationTooSmall"


def test_sum_command(tmp_path):
    code, out, _ = run("analyze", "brieskorn:2,3,7")
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    a.write_text(out)
    b.write_text(out)
    code, out, _ = run("sum", str(a), str(b), "--bound")
    assert code == 0 and json.loads(out) == {"kappa_upper": 0}
    code, _, err = run("--json-errors", "sum", str(a), str(b), "--exact")
    assert code == 1 and json.loads(err)["error"] == "ExactHypothesisViolated"
    code, _, _ = run("sum", str(a), "--exact", "--bound")
    assert code == 2


def test_kappa_ideal_command():
    code, out, _ = run("kappa-ideal", "--an", "4")
    assert json.loads(out) == {"ideal": {"z_power": 2, "w_gen": "2^0 w"}, "kappa": 2}
    code, out, _ = run("kappa-ideal", "--smash", "2,2,2,2")
    assert json.loads(out) == {"ideal": {"z_power": 4, "w_gen": "2^1 w"}, "kappa": 4}
    code, _, err = run("--json-errors", "kappa-ideal", "--smash", "2,3")
    assert code == 1 and json.loads(err)["error"] == "HypothesisViolated"


def test_usage_errors():
    assert run("analyze")[0] == 2
    assert run("analyze", "brieskorn:2,3,7", "--bogus")[0] == 2
    assert run("nonsense")[0] == 2
    code, _, err = run("--json-errors", "kappa-ideal", "--an", "1", "--smash", "2,2")
    assert code == 2
    assert err.count("\n") == 1 and json.loads(err)["error"] == "UsageError"


def test_computation_error_exit_code():
    code, _, err = run("--json-errors", "analyze", "brieskorn:2,4,5")
    assert code == 1
    d = json.loads(err)
    assert d["error"] == "ParseError" and "NotCoprime" in d["message"]
    code, _, _ = run("analyze", '{"vertices":[{"id":0,"framing":1}]}')
    assert code == 1


def test_root_formats_are_deterministic():
    outs = {}
    for fmt in ("json", "dot", "svg"):
        a = run("root", "brieskorn:2,3,13", "--format", fmt)[1]
        b = run("root", "brieskorn:2,3,13", "--format", fmt)[1]
        assert a == b
        outs[fmt] = a
    R = GradedRoot.from_dict(json.loads(outs["json"]))
    assert R.to_dict() == json.loads(outs["json"])
    assert outs["dot"].startswith("digraph")
    svg = ET.fromstring(outs["svg"])
    assert svg.tag.endswith("svg")
    assert len([e for e in svg.iter() if e.tag.endswith("circle")]) == 3


def test_emitters_on_incomplete_and_single_roots():
    single = GradedRoot.from_gradings([2], [], h=-2)
    assert "n0" in root_to_dot(single)
    ET.fromstring(root_to_svg(single))
    open_root = GradedRoot.from_gradings([0, 0], [None], h=-2)
    ET.fromstring(root_to_svg(open_root))


def test_spectrum_command_round_trip():
    for extra in ([], ["--pin2"]):
        code, out, _ = run("spectrum", "brieskorn:2,3,7", *extra)
        assert code == 0
        d = json.loads(out)
        assert SpectrumModel.from_dict(d).to_dict() == d
    d = json.loads(run("spectrum", "brieskorn:2,3,7", "--pin2")[1])
    assert len(d["j"]["theta"]) == 1 and len(d["j"]["pairs"]) == 1


def test_spinc_command():
    code, out, _ = run("spinc", '{"vertices":[{"id":0,"framing":-2}],"edges":[]}')
    rows = json.loads(out)
    assert len(rows) == 2 and all(r["self_conjugate"] for r in rows)


def test_parse_params():
    assert parse_params("# family\n2,3,7\n\n2,3,13  # comment\n") == [(2, 3, 7), (2, 3, 13)]
    with pytest.raises(ParseError):
        parse_params("2,3,x")


def test_atlas_deterministic(tmp_path):
    params = tmp_path / "p.txt"
    params.write_text("2,3,13\n2,3,7\n2,3,5\n")
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    assert run("atlas", "--family", "brieskorn", "--params", str(params), "--out", str(out1))[0] == 0
    assert run("atlas", "--family", "brieskorn", "--params", str(params), "--out", str(out2),
               "--threads", "2")[0] == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = list(csv.DictReader(io.StringIO(out1.read_text())))
    assert [r["params"] for r in rows] == ["2,3,5", "2,3,7", "2,3,13"]
    assert rows[0]["kappa"] == "1" and rows[0]["d"] == "2"
    assert list(rows[0]) == ["family", "params", "vertices", "det", "d", "delta", "alpha", "beta",
                             "gamma", "mu_bar", "kappa", "projective_n"]


def test_run_atlas_failures_empty():
    res = run_atlas([(2, 3, 7)])
    assert res[0][2] == []


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "plumbswf", "kappa-ideal", "--an", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["kappa"] == 0
