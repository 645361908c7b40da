import subprocess
import sys

import pytest

from qexpand.cli import run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out.strip(), err


def test_translate_remark(capsys):
    code, out, err = call(capsys, "translate", "--base", "3", "--digits", "0,2", "--ell", "2",
                          "--coding", "factorial-twos", "--prefix", "10")
    assert (code, out) == (0, "q=3:0000000000")
    assert "warning" in err


def test_member(capsys):
    assert call(capsys, "member", "--base", "3", "--digits", "0,2",
                "--rational", "1/4")[:2] == (0, "true witness=ε(02)")
    assert call(capsys, "member", "--base", "3", "--digits", "0,2",
                "--rational", "1/2")[:2] == (0, "false")
    code, _, err = call(capsys, "member", "--base", "3", "--rational", "5/2")
    assert code == 1 and "error" in err


def test_liouville(capsys):
    assert call(capsys, "liouville", "--base", "3", "--gap", "factorial",
                "--prefix", "6")[:2] == (0, "q=3:110001")
    assert call(capsys, "liouville", "--prefix", "6", "--runs")[1] == "1^2,0^3,1^1"
    assert call(capsys, "liouville", "--prefix", "100000000")[0] == 2


def test_block_log(capsys):
    code, out, _ = call(capsys, "translate", "--coding", "literal:2", "--prefix", "9",
                        "--blocks")
    lines = out.splitlines()
    assert lines[0] == "q=3:012221222"
    assert "k=2 tag=PENDING_BORROW emit=1,2^3 pending=2" in lines


def test_code(capsys):
    assert call(capsys, "code", "--word", "202")[1] == "20/27"
    assert call(capsys, "code", "--rational", "1/3")[1].splitlines() == ["1(0)", "0(2)"]
    assert call(capsys, "code", "--word", "212")[0] == 1


def test_oracle_check(capsys):
    code, out, _ = call(capsys, "oracle-check", "--base", "5", "--ell", "3",
                        "--coding", "random:7", "--prefix", "200")
    assert (code, out) == (0, "agree n=200")


def test_certify_and_verify(capsys, tmp_path):
    code, out, _ = call(capsys, "certify", "--k-range", "2..6", "--horizon", "720",
                        "--max-pre", "100", "--max-period", "100")
    assert code == 0 and "verdict: NO_PERIOD_FOUND" in out
    path = tmp_path / "cert.txt"
    path.write_text(out + "\n")
    assert call(capsys, "certify", "--verify", str(path))[:2] == (0, "verified")
    path.write_text(out.replace("horizon: 720", "horizon: 700") + "\n")
    code, out, _ = call(capsys, "certify", "--verify", str(path))
    assert code == 1 and out.startswith("rejected")
    code, _, _ = call(capsys, "certify", "--k-range", "2..7", "--horizon", "1000")
    assert code == 2


def test_scan_and_montecarlo(capsys):
    code, out, _ = call(capsys, "scan", "--t", "1/2", "--max-den", "2", "--depth", "8")
    assert out.splitlines() == ["1/2", "3/2", "hits=2"]
    code, out, _ = call(capsys, "montecarlo", "--max-den", "5", "--depth", "8",
                        "--samples", "50", "--seed", "2")
    assert code == 0 and out.startswith("fraction=") and len(out.split("=")[1]) == 8


def test_json_output(capsys):
    import json
    _, out, _ = call(capsys, "member", "--rational", "1/4", "--json")
    assert json.loads(out) == {"member": True, "witness": "ε(02)"}


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qexpand", "liouville", "--prefix", "6"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "q=3:110001"
