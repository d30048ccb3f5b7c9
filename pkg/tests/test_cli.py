import json
import subprocess
import sys

import pytest

from wengzeta.cli import JobSpec, UsageError, main, parse_job


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_formula_a1(capsys):
    code, out, _ = run_cli(capsys, "formula", "A", "1", "--p", "1", "--output", "text")
    assert code == 0
    assert out.strip() == "zhat(s+2)/s - zhat(s+1)/(s+2)"


def test_formula_json_is_deterministic(capsys):
    _, a, _ = run_cli(capsys, "formula", "B", "3", "--all-p", "--output", "json")
    _, b, _ = run_cli(capsys, "formula", "B", "3", "--all-p", "--output", "json")
    assert a == b
    obj = json.loads(a)
    assert [x["p"] for x in obj] == [1, 2, 3]


def test_tables_f4(capsys):
    code, out, _ = run_cli(capsys, "tables", "F", "4", "--output", "json")
    assert code == 0
    assert json.loads(out)["c_p"] == [11, 7, 5, 8]


def test_tables_compare_appendix2(capsys):
    code, out, _ = run_cli(capsys, "tables", "E", "7", "--compare", "appendix2", "--output", "json")
    assert code == 0
    assert json.loads(out)["compare"]["match"]


def test_tables_compare_custom_fixture(capsys, tmp_path):
    path = tmp_path / "cp.json"
    path.write_text(json.dumps({"c_p": [3, 4]}))
    code, _, _ = run_cli(capsys, "tables", "A", "2", "--compare", str(path))
    assert code == 1


def test_fe_check_g2(capsys):
    code, out, _ = run_cli(capsys, "fe-check", "G", "2", "--all-p")
    assert code == 0
    assert out.count(": ok") == 2


def test_chains_g2_match(capsys):
    code, out, _ = run_cli(capsys, "chains", "G", "2", "--p", "1", "--compare", "appendix1")
    assert code == 0
    assert "L1: 13 12 11 10" in out
    assert "identical" in out


def test_chains_mismatch_exit_1(capsys):
    code, out, _ = run_cli(capsys, "chains", "E", "6", "--p", "1", "--compare", "appendix1")
    assert code == 1
    assert "DIFFERENT" in out and "P1:" in out


def test_zeros_csv(capsys):
    code, out, _ = run_cli(capsys, "zeros", "A", "1", "--p", "1", "--t-max", "20", "--output", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,residual,re_deviation,simple"
    assert len(lines) >= 2


def test_count(capsys):
    code, out, _ = run_cli(capsys, "count", "A", "1", "--p", "1", "--re-lo", "-2.5", "--re-hi", "0.5", "--t-max", "30", "--output", "json")
    assert code == 0
    assert json.loads(out)[0]["count"] == 3


def test_invariants(capsys):
    code, out, _ = run_cli(capsys, "invariants", "B", "3", "--all-p")
    assert code == 0
    assert out.count("all pass") == 3


@pytest.mark.parametrize(
    "argv",
    [
        ["formula", "Q", "2", "--p", "1"],
        ["formula", "A", "2"],
        ["formula", "A", "2", "--p", "3"],
        ["formula", "A", "2", "--p", "1", "--all-p"],
        ["zeros", "A", "1", "--p", "1", "--t-max", "-1"],
        ["tables", "A", "2", "--output", "latex"],
        ["chains", "A", "2", "--p", "1", "--compare", "appendix2"],
        ["chains", "A", "2", "--p", "1", "--compare", "appendix1"],
        ["count", "A", "1", "--p", "1", "--re-lo", "1"],
        ["frobnicate", "A", "1"],
        ["formula", "E", "8", "--p", "1"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["exit"] == 2


def test_parse_job_fields():
    job = parse_job(["count", "c", "2", "--p", "2", "--re-lo", "-3", "--re-hi", "0", "--t-lo", "1"])
    assert job == JobSpec("count", "C", 2, p=2, window=(-3.0, 0.0, 1.0))
    with pytest.raises(UsageError):
        JobSpec("zeros", "A", 1, p=1, threads=0).validate()


def test_threads_give_same_output(capsys):
    _, a, _ = run_cli(capsys, "fe-check", "B", "3", "--all-p", "--output", "json")
    _, b, _ = run_cli(capsys, "fe-check", "B", "3", "--all-p", "--output", "json", "--threads", "2")
    assert json.loads(a)["ok"] and json.loads(b)["ok"]
    assert [c["p"] for c in json.loads(a)["cases"]] == [c["p"] for c in json.loads(b)["cases"]]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wengzeta", "formula", "A", "1", "--p", "1"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.strip() == "zhat(s+2)/s - zhat(s+1)/(s+2)"
