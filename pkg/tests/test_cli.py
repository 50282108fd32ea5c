import json
import subprocess
import sys

import pytest

from qmasa import cli
from qmasa.verdict import FAIL, PASS, Verdict


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def records(out):
    return [json.loads(line) for line in out.splitlines()]


def test_verify_hecke_core(capsys):
    code, out = run(capsys, "verify", "hecke-core", "--L", "3", "--jobs", "1")
    recs = records(out)
    assert code == 0
    assert {r["check"] for r in recs} == {"hecke-product", "hecke-associativity",
                                          "hecke-star-trace", "hecke-quadratic"}
    assert all(set(r) == {"check", "params", "status", "residual"} for r in recs)


def test_timing_adds_runtime(capsys):
    _, out = run(capsys, "verify", "hecke-core", "--L", "3", "--jobs", "1", "--timing")
    assert all(isinstance(r["runtime_ms"], int) for r in records(out))


def test_density_suite_csv(capsys):
    code, out = run(capsys, "verify", "density", "--L", "3", "--p", "0", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "n,p,exact,quadrature,abs_err"
    assert len(lines) == 12
    assert lines[3].startswith("2,0,3,")


def test_negative_rational_flag(capsys):
    code, out = run(capsys, "radial", "moments", "--p", "-1/2", "--nmax", "3", "--format", "csv")
    assert out.splitlines()[1].startswith("0,-1/2,1,")
    assert code == 0


def test_popa_orthogonal_suite(capsys):
    code, out = run(capsys, "verify", "popa-orthogonal", "--q", "1/2", "--trunc", "6", "--jobs", "1")
    recs = records(out)
    assert code == 0 and len(recs) == 50
    assert all(r["status"] == PASS for r in recs)


def test_popa_orthogonal_rows(capsys):
    code, out = run(capsys, "popa", "orthogonal", "--trunc", "6", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "k,norm"
    assert [line.split(",")[1] for line in lines[4:]] == ["0.0"] * 4


def test_popa_general_tables(capsys, tmp_path):
    _, out = run(capsys, "popa", "general", "--format", "csv")
    assert out.splitlines()[0] == "j,lhs,envelope"
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("q = -1/2  # negative q\nN = 8\n")
    code, out = run(capsys, "popa", "general", "--config", str(cfg), "--table", "decay", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "k,norm" and len(out.splitlines()) == 10


def test_lemma24_rows(capsys):
    code, out = run(capsys, "radial", "lemma24", "--delta", "0.4,0.2", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "delta,K,residual" and len(lines) == 3
    assert code == 0


def test_determinism_and_out_file(capsys, tmp_path):
    argv = ["pukanszky", "lemma32", "--case", "3", "--L", "3", "--seed", "7", "--jobs", "1"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second
    target = tmp_path / "out.jsonl"
    run(capsys, *argv, "--out", str(target))
    assert target.read_text() == first


def test_parallel_matches_serial(capsys):
    _, a = run(capsys, "verify", "hecke-core", "--jobs", "1")
    _, b = run(capsys, "verify", "hecke-core", "--jobs", "2")
    assert a == b


def test_fock_commands(capsys):
    code, out = run(capsys, "fock", "growth", "--depth", "3", "--format", "csv")
    assert out.splitlines()[:3] == ["j,norm2,ratio", "1,1,0.5", "2,3/2,0.75"]
    code, out = run(capsys, "fock", "matrix", "--dim", "1", "--trunc", "2")
    assert out.splitlines()[1] == "1/1,0/1,3/2"


def test_commutant_reports_failure_with_boundary_rows_dropped(capsys):
    code, out = run(capsys, "radial", "commutant", "--trunc", "4")
    assert code == 1 and records(out)[0]["status"] == FAIL
    code, out = run(capsys, "radial", "commutant", "--trunc", "4", "--drop", "0")
    assert code == 0


def test_usage_errors(capsys):
    for argv in (["verify", "nonsense"], ["radial", "lemma24", "--delta", "1.5"],
                 ["radial", "lemma24", "--delta", "x"], ["popa", "general", "--q", "abc"],
                 ["popa", "general", "--q", "2"], ["radial", "lemma24", "--v", "0"],
                 ["verify", "radial", "--jobs", "0"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_exit_code_rules():
    assert cli._exit_code([Verdict("a"), Verdict("b", status="anomaly")]) == 0
    assert cli._exit_code([Verdict("a"), Verdict("b", status=FAIL)]) == 1


def test_unknown_suite_in_library_call():
    with pytest.raises(cli.UsageError):
        cli.suite_tasks("nope", cli.build_parser().parse_args(["verify", "radial"]))


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qmasa", "pukanszky", "toeplitz"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert [json.loads(x)["status"] for x in res.stdout.splitlines()] == [PASS, PASS]
