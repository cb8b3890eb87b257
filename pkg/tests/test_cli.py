import io
import json

import pytest

from legendre_rank.cli import EXIT_ASSERTION, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE, dispatch
from legendre_rank.pipelines import prove_rank_zero
from legendre_rank.reports import Report, emit_report, parse_report


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_prove_q5():
    code, out, err = run("prove", "--q", "5")
    assert code == EXIT_OK and err == ""
    doc = json.loads(out)
    assert doc["result"]["concluded_rank"] == 0 and doc["version"]
    assert doc["result"]["root_number"] == "+1"


def test_prove_q11_fails_quietly():
    code, out, err = run("prove", "--q", "11")
    assert code == EXIT_PRECONDITION and out == ""
    assert "2^11-1 composite" in err


def test_surface_types_listing():
    code, out, _ = run("surface-types")
    lines = out.strip().splitlines()
    assert code == EXIT_OK and len(lines) == 3
    assert lines[0].startswith("t: I2") and lines[2].startswith("infinity: I2*")


@pytest.mark.parametrize(
    "argv",
    [(), ("bogus",), ("prove",), ("prove", "--q", "x"), ("scan", "--height", "0"),
     ("descend", "--curve", "1,2,3"), ("confirm", "--q", "5", "--format", "csv"), ("mersenne", "--limit", "1")],
)
def test_usage_errors(argv):
    code, out, err = run(*argv)
    assert code == EXIT_USAGE and out == "" and err


def test_assertion_exit_code(monkeypatch):
    from legendre_rank import pipelines
    from legendre_rank.errors import AssertionFailed

    def boom(q):
        raise AssertionFailed("reduction at 2 is nonsplit")

    monkeypatch.setattr(pipelines, "prove_rank_zero", boom)
    code, out, err = run("prove", "--q", "5")
    assert code == EXIT_ASSERTION and out == "" and "nonsplit" in err


def test_mersenne_text_and_estimate():
    code, out, _ = run("mersenne", "--limit", "130", "--estimate")
    lines = out.splitlines()
    assert lines[:12] == ["2", "3", "5", "7", "13", "17", "19", "31", "61", "89", "107", "127"]
    assert any("estimate(log base e)" in l for l in lines) and any("log base 2" in l for l in lines)


@pytest.mark.parametrize(
    "argv",
    [
        ("prove", "--q", "7"),
        ("confirm", "--q", "5", "--height", "50"),
        ("scan", "--height", "3", "--search-height", "10"),
        ("surface-types", "--format", "json"),
        ("neumann-setzer", "--limit", "10"),
        ("mersenne", "--limit", "40", "--estimate", "--format", "json"),
        ("descend", "--curve", "0,0,0,-25,0", "--height", "50"),
        ("descend", "--curve", "0,0,1,-1,0"),
    ],
)
def test_json_is_deterministic_and_round_trips(argv):
    code1, out1, _ = run(*argv)
    code2, out2, _ = run(*argv)
    assert code1 == code2 == EXIT_OK and out1 == out2
    rep = parse_report(out1)
    assert emit_report(rep, "json").decode() == out1


def test_scan_csv_and_empty_scan():
    code, out, _ = run("scan", "--height", "2", "--format", "csv")
    assert code == EXIT_OK and out.splitlines()[0].startswith("b,height,classification")
    from legendre_rank.pipelines import summarize

    empty = Report("scan", {"height": 0}, summarize([], 0, 10))
    doc = json.loads(emit_report(empty))
    assert doc["records"] == [] and doc["statistics"]["mean_root_number"] is None


def test_timings_flag_adds_field(tmp_path):
    path = tmp_path / "cert.json"
    code, out, _ = run("prove", "--q", "5", "--timings", "--output", str(path))
    assert code == EXIT_OK and out == ""
    assert "seconds" in json.loads(path.read_text())["timings"]


def test_rationals_serialize_as_fractions():
    code, out, _ = run("scan", "--height", "2")
    bs = [r["b"] for r in json.loads(out)["records"]]
    assert all("/" in b for b in bs) and "-1/2" in bs


def test_report_equality_after_round_trip():
    rep = Report("certificate", {"q": 5}, prove_rank_zero(5))
    assert parse_report(emit_report(rep).decode()) == rep
