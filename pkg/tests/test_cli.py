import json

import pytest

from celinesum import cli
from celinesum.errors import VerificationError
from celinesum.operators import normalize, parse_operator, to_text

FIB = ["--rec", "N^2-N-1", "--init", "0,1", "--term", "binomial(n,k)"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_findrec_text(capsys):
    code, out, _ = run(capsys, "findrec", *FIB)
    assert code == 0
    assert "operator: N^2 + (-3)*N + (1)" in out


def test_findrec_json_schema(capsys):
    code, out, _ = run(capsys, "findrec", *FIB, "-d", "2", "--json")
    rec = json.loads(out)
    assert code == 0
    assert list(rec)[:3] == ["operator", "valid_from", "I_used"]
    assert list(rec)[-2:] == ["stages", "fit"]
    assert rec["operator"]["order"] == 2  # the (-1)^k part of F_k^2 transforms to 0^n
    # the printed operator re-parses to itself
    text = rec["operator"]["text"]
    assert to_text(normalize(parse_operator(text))) == text


@pytest.mark.parametrize("argv", [
    ["findrec", "--rec", "N^2-N-1", "--init", "0,1", "--term", "binomial(n,k"],
    ["findrec", "--rec", "N^2-N-", "--init", "0,1", "--term", "binomial(n,k)"],
    ["findrec", "--rec", "N^2-N-1", "--init", "0,", "--term", "binomial(n,k)"],
    ["findrec", "--rec", "N^2-N-1", "--init", "0,1", "--term", "binomial(n^2,k)"],
    ["asym", "--op", "N-2", "--init", "1,3", "--n-max", "50"],
])
def test_input_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "input error" in err


def test_not_found_exit_3(capsys):
    code, _, err = run(capsys, "findrec", *FIB, "-d", "3", "--I-max", "2", "--J-max", "2")
    assert code == 3 and "not found" in err


def test_timeout_exit_4(capsys):
    code, _, _ = run(capsys, "findrec", *FIB, "-d", "3", "--I-max", "3", "--timeout", "1e-6")
    assert code == 4


def test_verification_failure_exit_5(capsys, monkeypatch):
    def broken(*args, **kwargs):
        raise VerificationError("operator fails on closed-walk counts")
    monkeypatch.setattr(cli.apps, "kingwalks", broken)
    code, _, err = run(capsys, "kingwalks", "2")
    assert code == 5 and "verification failed" in err


def test_multisum_stages(capsys):
    code, out, _ = run(capsys, "multisum", "--stage", "binomial(i,k)", "--stage", "binomial(n,i)", "--json")
    rec = json.loads(out)
    assert code == 0
    assert [s["operator"]["text"] for s in rec["stages"]] == ["N + (-2)", "N + (-3)"]
    assert rec["operator"]["text"] == "N + (-3)"


def test_single_stage_matches_findrec(capsys):
    _, a, _ = run(capsys, "multisum", "--stage", "binomial(n,k)^2", "--json")
    _, b, _ = run(capsys, "findrec", "--rec", "N-1", "--init", "1", "--term", "binomial(n,k)^2", "--json")
    assert json.loads(a)["operator"] == json.loads(b)["operator"]


def test_multisum_reports_failing_stage(capsys):
    code, _, err = run(capsys, "multisum", "--stage", "binomial(i,k)^3", "--stage", "binomial(n,i)",
                       "--I-max", "1", "--J-max", "1")
    assert code == 3 and "stage 1" in err


def test_asym(capsys):
    code, out, _ = run(capsys, "asym", "--op", "N-2", "--init", "1", "--n-max", "100", "--json")
    fit = json.loads(out)["fit"]
    assert code == 0
    assert fit["r"] == pytest.approx(2) and fit["theta_used"] == "0" and fit["c"] == pytest.approx(1)


def test_asym_inconclusive_exit_3(capsys):
    code, out, _ = run(capsys, "asym", "--op", "N+2", "--init", "1", "--n-max", "100")
    assert code == 3 and "inconclusive" in out


def test_kingwalks_small(capsys):
    code, out, _ = run(capsys, "kingwalks", "1", "--json")
    rec = json.loads(out)
    assert code == 0 and rec["walk_check"]["holds"]
    assert rec["operator"]["text"] == "(n+2)*N^2 + (-4*n-4)"


def test_module_entry_point():
    import subprocess
    import sys
    proc = subprocess.run([sys.executable, "-m", "celinesum", "findrec", *FIB], capture_output=True, text=True)
    assert proc.returncode == 0 and "N^2 + (-3)*N" in proc.stdout
