import json
import os
import subprocess
import sys

import mpmath
import pytest

from lavrik import __version__
from lavrik.cli import EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_OK, EXIT_PRECISION, build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_lambda_half(capsys):
    code, out, _ = run(capsys, "eval", "--which", "Lambda", "--sigma", "0.5", "--t", "0")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["version"] == __version__ and doc["tool"] == "lavrik"
    assert doc["config"]["bits"] == 128 and doc["config"]["which"] == "Lambda"
    assert doc["value"]["re"].startswith("-1.988483112753")
    assert isinstance(doc["value"]["re"], str) and "error_estimate" in doc["value"]


def test_eval_trivial_zero(capsys):
    code, out, _ = run(capsys, "eval", "--which", "L", "--sigma", "-2", "--format", "text")
    assert code == EXIT_OK
    assert [float(x) for x in out.split()] == [0.0, 0.0]


def test_eval_z_near_zero(capsys):
    code, out, _ = run(capsys, "eval", "--which", "Z", "--t", "14.1347251417", "--bits", "256", "--format", "text")
    assert code == EXIT_OK
    assert abs(float(out.split()[0])) < 1e-6


def test_eval_z_keeps_working_precision(capsys):
    code, out, _ = run(capsys, "eval", "--which", "Z", "--t", "100", "--bits", "200", "--format", "text")
    assert code == EXIT_OK
    with mpmath.workprec(200):
        assert abs(mpmath.mpf(out.split()[0]) - mpmath.siegelz(100)) < mpmath.mpf(10) ** -25


def test_eval_exit_codes(capsys):
    assert run(capsys, "eval", "--which", "Z", "--t", "200")[0] == EXIT_PRECISION
    assert run(capsys, "eval", "--which", "Lambda", "--sigma", "0", "--t", "0")[0] == EXIT_DOMAIN
    assert run(capsys, "eval", "--tau-re", "-1")[0] == EXIT_DOMAIN
    with pytest.raises(SystemExit) as exc:
        main(["eval", "--which", "nonsense"])
    assert exc.value.code == 2


def test_eval_theta_and_xi(capsys):
    _, out, _ = run(capsys, "eval", "--which", "theta", "--sigma", "1", "--format", "text")
    assert out.startswith("1.0864348112133080145753161215")
    _, out, _ = run(capsys, "eval", "--which", "Xi", "--sigma", "0", "--t", "0", "--format", "text")
    with mpmath.workdps(30):
        assert abs(mpmath.mpf(out.split()[0]) - mpmath.mpf("0.497120778188314109912734")) < 1e-20


def test_verify_commands(capsys):
    code, out, _ = run(capsys, "verify", "--which", "theta_fe", "--samples", "5")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["passed"] and mpmath.mpf(doc["rows"][0]["residual"]) == 0
    code, out, _ = run(capsys, "verify", "--which", "mellin", "--sigma", "0.5", "--t", "0", "--c", "2")
    assert code == EXIT_OK and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "--which", "decomposition", "--samples", "6", "--seed", "3")
    assert code == EXIT_OK and len(json.loads(out)["rows"]) == 6
    assert run(capsys, "verify", "--which", "mellin", "--sigma", "3", "--c", "2")[0] == EXIT_DOMAIN


def test_output_is_reproducible(capsys):
    argv = ["verify", "--which", "decomposition", "--samples", "3", "--seed", "11"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    c = run(capsys, "verify", "--which", "decomposition", "--samples", "3", "--seed", "12")[1]
    assert a != c


def test_zeros_and_resume(capsys, tmp_path):
    path = str(tmp_path / "z.jsonl")
    code, out, err = run(capsys, "zeros", "--t-max", "0", "--out", path)
    assert code == EXIT_OK
    summary = json.loads(out)["summary"]
    assert summary["count"] == 1 and summary["halfplane"]["passed"]
    lines = open(path).read().splitlines()
    assert len(lines) == 1 and json.loads(lines[0])["re"].startswith("11.25170908146")
    code, out, err = run(capsys, "zeros", "--t-max", "0", "--resume", path, "--quiet")
    assert code == EXIT_OK and err == ""
    assert open(path).read().splitlines() == lines


def test_xray_writes_svg_and_csv(capsys, tmp_path):
    svg = str(tmp_path / "x.svg")
    code, _, err = run(capsys, "xray", "--which", "Lambda", "--region", "-2", "6", "-4", "4",
                       "--nx", "17", "--ny", "17", "--out", svg, "--thick", "2.5")
    assert code == EXIT_OK and "curves" in err
    text = open(svg).read()
    assert text.startswith("<?xml") and "stroke-width:2.5" in text and "<polyline" in text
    csv_path = str(tmp_path / "x.csv")
    code, _, _ = run(capsys, "xray", "--which", "L", "--region", "-5", "1", "-1", "1", "--nx", "13",
                     "--ny", "9", "--format", "csv", "--out", csv_path, "--quiet")
    assert code == EXIT_OK and open(csv_path).readline().strip() == "kind,idx,re,im"
    assert run(capsys, "xray", "--format", "json", "--nx", "3", "--ny", "3")[0] == EXIT_DOMAIN


def test_xray_zero_markers(capsys, tmp_path):
    svg = str(tmp_path / "x.svg")
    zeros = os.path.join(os.path.dirname(__file__), "data", "zeros.jsonl")
    run(capsys, "xray", "--which", "sLambda", "--region", "-2", "30", "-2", "30", "--nx", "17", "--ny", "17",
        "--zeros", zeros, "--out", svg, "--quiet")
    expected = 0
    for line in open(zeros):
        rec = json.loads(line)
        x, y = float(rec["re"]), float(rec["im"])
        expected += sum(1 for yy in {y, -y} if -2 <= x <= 30 and -2 <= yy <= 30)
    assert expected >= 3
    assert open(svg).read().count('class="zero"') == expected


def test_argtrack(capsys, tmp_path):
    out_csv = str(tmp_path / "a.csv")
    code, out, _ = run(capsys, "argtrack", "--t-max", "12", "--out", out_csv)
    doc = json.loads(out)
    assert code == EXIT_OK and doc["report"]["passed"]
    assert doc["report"]["alpha"].startswith("0.01090655919896889218027711898")
    assert doc["report"]["anchor"]["arg"].startswith("3.14159265358979323846")
    assert doc["config"]["out"] == out_csv
    assert open(out_csv).readline().strip() == "t,arg,a"


def test_bits_environment_default(monkeypatch):
    monkeypatch.setenv("LAVRIK_BITS", "96")
    assert build_parser().parse_args(["eval"]).bits == 96
    assert build_parser().parse_args(["eval", "--bits", "200"]).bits == 200


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "lavrik.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
    assert EXIT_CHECK_FAILED == 1
