import json
import re

import pytest

from affgaudin.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_invariants_degree_four(capsys):
    code, out, _ = run(capsys, "invariants", "--degree", "4")
    assert code == EXIT_OK
    assert "dimension: 14" in out
    assert "v14 =" in out


def test_basis_records(capsys):
    code, out, _ = run(capsys, "basis", "--degree", "1", "--format", "records")
    rec = json.loads(out)
    assert code == EXIT_OK and rec["dimension"] == 3


def test_singular_display_format(capsys):
    code, out, _ = run(capsys, "singular", "--degree", "2", "--format", "paper")
    assert code == EXIT_OK and "dimension: 1" in out and "|0>" in out


def test_appendix_verification_exit_codes(capsys):
    code, out, _ = run(capsys, "zero-product", "-m", "1", "-n", "1", "--verify-appendix")
    assert code == EXIT_OK and "appendix_11_residual_terms: 0" in out


def test_hbar_pair(capsys):
    code, out, _ = run(capsys, "hbar", "--pair", "1", "3", "--cutoff", "3")
    assert code == EXIT_OK and "residual_zero: True" in out


def test_hbar_degree(capsys):
    code, out, _ = run(capsys, "hbar", "--degree", "2")
    assert code == EXIT_OK and "correction_coefficient: 20/3" in out


@pytest.mark.parametrize("argv", [
    ["invariants"],
    ["frobnicate"],
    ["hbar", "--pair", "2", "2"],
    ["hbar"],
    ["singular", "--degree", "7"],
    ["zero-product", "-m", "2", "-n", "1"],
    ["zero-product", "-m", "3", "-n", "3", "--verify-appendix"],
    ["invariants", "--degree", "2", "--threads", "0"],
    ["invariants", "--degree", "2", "--golden", "/nonexistent.json"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert "usage error" in err


def test_golden_override_changes_result(capsys, tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps({"format": 1, "entries": [
        {"tag": "A11", "expr": "9 * u^-1 * I[a=a,n=-2,pt=z] * I[a=a,n=-1,pt=w] * vac"},
        {"tag": "B11", "expr": "8 * u^-2 * I[a=a,n=-1,pt=z] * I[a=a,n=-1,pt=w] * vac"},
        {"tag": "sigma1", "expr": "d[a,b] * I[a=a,n=-1] * I[a=b,n=-1] * vac"},
    ]}))
    code, _, _ = run(capsys, "zero-product", "-m", "1", "-n", "1", "--verify-appendix", "--golden", str(p))
    assert code == EXIT_FAIL
    code, _, _ = run(capsys, "zero-product", "-m", "1", "-n", "1", "--verify-appendix")
    assert code == EXIT_OK


def test_deterministic_output(capsys):
    _, a, _ = run(capsys, "zero-product", "-m", "1", "-n", "1", "--format", "records")
    _, b, _ = run(capsys, "zero-product", "-m", "1", "-n", "1", "--format", "records")
    strip = lambda s: re.sub(r'"wall_time": [0-9.e-]+', "", s)
    assert strip(a) == strip(b)
