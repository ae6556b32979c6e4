import csv
import io
import json
import subprocess
import sys

import pytest

from padic_gibbs import __version__
from padic_gibbs.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr().out


def invoke_json(capsys, *argv):
    code, out = invoke(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def test_classify_json(capsys):
    code, doc = invoke_json(capsys, "classify", "--p", "3", "--j", "1")
    assert code == 0
    assert set(doc) >= {"tool", "version", "input", "results", "discrepancies", "status"}
    assert doc["version"] == __version__ and doc["status"] == "ok"
    res = doc["results"]
    assert res["translation_invariant"]["count"] == 1
    assert res["periodic"]["count"] == 0
    assert res["boundedness"][0]["theorem"] == "unbounded"
    for note in doc["discrepancies"]:
        assert "published" in note and "computed" in note


def test_json_is_deterministic(capsys):
    _, first = invoke(capsys, "classify", "--p", "5", "--j", "-1", "--format", "json")
    _, second = invoke(capsys, "classify", "--p", "5", "--j", "-1", "--format", "json")
    assert first == second


def test_table1_csv(capsys):
    code, out = invoke(capsys, "table1", "--primes", "2,3,5,7,11,13,17,19", "--j", "-1",
                       "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["agree_flag"] for r in rows] == ["true"] * 7 + ["false"]
    assert rows[-1]["computed_value"] == "+" and rows[-1]["published_value"] == "-"


def test_sqrt_digits(capsys):
    code, doc = invoke_json(capsys, "sqrt", "--p", "5", "--num", "-1", "--den", "1")
    assert code == 0 and doc["results"]["root"]["digits"][:2] == [2, 1]


def test_sqrt_error_is_named(capsys):
    code, doc = invoke_json(capsys, "sqrt", "--p", "3", "--num", "2")
    assert code == 1 and doc["error"]["name"] == "NotASquare"


def test_verify_passes(capsys):
    code, doc = invoke_json(capsys, "verify", "--p", "29", "--j", "1", "--depth", "2")
    assert code == 0
    fields = doc["results"]["fields"]
    assert [f["field"] for f in fields] == ["h0", "h1", "h2", "per1", "per2"]
    assert all(f["passed"] for f in fields)


def test_growth_csv(capsys):
    code, out = invoke(capsys, "growth", "--p", "3", "--j", "1", "--field", "h0",
                       "--max-depth", "3", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [int(r["sigma_star_log_norm"]) for r in rows] == [1, 3, 7]


def test_info(capsys):
    code, out = invoke(capsys, "info")
    assert code == 0 and __version__ in out


def test_out_path(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out = invoke(capsys, "info", "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["tool"] == "padic-gibbs"


@pytest.mark.parametrize("argv", [
    ["classify", "--p", "4", "--j", "1"],
    ["classify", "--p", "5", "--j", "0"],
    ["classify", "--p", "5"],
    ["classify", "--p", "5", "--j", "1", "--bogus"],
    ["classify", "--p", "5", "--j", "1", "--format", "csv"],
    ["table1", "--primes", "2,x", "--j", "-1"],
    ["table1", "--primes", "7", "--j", "1"],
    ["growth", "--p", "2", "--j", "1", "--field", "per1"],
    ["verify", "--p", "5", "--j", "1", "--depth", "4"],
    ["sqrt", "--p", "5", "--num", "1", "--den", "0"],
])
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as info:
        run(argv)
    assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "padic_gibbs", "classify", "--p", "5",
                           "--j", "1"], capture_output=True, text=True)
    assert proc.returncode == 0 and "2-periodic fields: 2" in proc.stdout


def test_internal_inconsistency_exits_three(capsys, monkeypatch):
    import padic_gibbs.cli as cli
    from padic_gibbs.errors import InternalInconsistency

    def broken(*args, **kwargs):
        raise InternalInconsistency("constructed 1 fields, congruences give 3")

    monkeypatch.setattr(cli, "classify", broken)
    code, doc = invoke_json(capsys, "classify", "--p", "29", "--j", "1")
    assert code == 3 and doc["error"]["name"] == "InternalInconsistency"


def test_failed_verification_exits_one(capsys, monkeypatch):
    import padic_gibbs.cli as cli
    from padic_gibbs.gibbs_model import ConsistencyReport

    monkeypatch.setattr(cli, "check_consistency",
                        lambda n, f, params: ConsistencyReport(n, 3, 44, False, "+"))
    code, doc = invoke_json(capsys, "verify", "--p", "5", "--j", "1", "--depth", "1")
    assert code == 1 and doc["error"]["name"] == "VerificationFailed"
    assert doc["results"]["passed"] is False
