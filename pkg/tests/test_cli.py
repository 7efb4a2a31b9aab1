import json
import subprocess
import sys

import pytest

from symdiff3 import __version__
from symdiff3.cli import EXIT_DEGENERATE, EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, main

FIX_C = ["--a", "1 + z*w - 0.5*w^2", "--b", "1 + 0.5*z^2 - z*w"]
FIX_W = ["--a=-(1+z*w)^2", "--b=-(1+z*w)"]
FIX_K = ["--a=-1", "--b=-1"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, body):
    p = tmp_path / name
    p.write_text(body, encoding="utf-8")
    return str(p)


def test_check_fixture_c(capsys):
    code, out, _ = run(capsys, "check", *FIX_C)
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["verdict"] == "Closed"
    assert rep["version"] == __version__
    assert {c["name"] for c in rep["criteria"]} == {"thm1", "thm2", "oracle"}
    assert all(c["max_abs_residual"] < 1e-9 for c in rep["criteria"])
    assert rep["preconditions"] == {"blaschke_unit": True, "discriminant_unit": True}
    assert rep["input"]["fields"]["a"].startswith("(1+0i)")


def test_check_fixture_k(capsys):
    code, out, _ = run(capsys, "check", *FIX_K)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["verdict"] == "Closed"
    assert rep["preconditions"]["blaschke_unit"] is False
    flags = {c["name"]: c["applicable"] for c in rep["criteria"]}
    assert flags == {"thm1": False, "thm2": False, "oracle": True}


def test_oracle_fixture_w(capsys):
    code, out, _ = run(capsys, "oracle", *FIX_W)
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["status"] == "Obstructed" and rep["obstruction_order"] == 3


def test_oracle_decomposition_is_printed(capsys):
    _, out, _ = run(capsys, "oracle", *FIX_K)
    rep = json.loads(out)
    assert rep["decomposition"]["H"] == "(-1+0i)*z + (-1+0i)*w"


def test_web_and_cross_validate(capsys):
    code, out, _ = run(capsys, "web", "--c0", "1", "--c1", "z", "--c2", "w", "--c3=-1")
    rep = json.loads(out)
    assert code == EXIT_OK and max(rep["frame_residuals"].values()) < 1e-9
    code, out, _ = run(capsys, "cross-validate", *FIX_W)
    rep = json.loads(out)
    assert code == EXIT_OK and rep["crosschecks"]["passed"]
    assert rep["verdict"] == "NotClosed"


def test_cubic_mode_runs_oracle_in_adapted_chart(capsys):
    code, out, _ = run(capsys, "oracle", "--c0", "0", "--c1", "1 + z*w - 0.5*w^2",
                       "--c2", "1 + 0.5*z^2 - z*w", "--c3", "0")
    assert code == EXIT_OK and json.loads(out)["status"] == "ClosedDecompositionFound"


def test_ini_input_and_modes(tmp_path, capsys):
    adapted = write(tmp_path, "c.ini", "[input]\nmode = adapted\na = 1 + z*w - 0.5*w^2\n"
                                      "b = 1 + 0.5*z^2 - z*w  # fixture C\norder = 10\n")
    frame = write(tmp_path, "f.ini", "[input]\nmode = frame\nomega1 = 1+z*w ; 0\n"
                                    "omega2 = 0 ; 1\nomega3 = -1-z*w ; -1\n")
    code, out, _ = run(capsys, "check", adapted, frame)
    reps = json.loads(out)
    assert code == EXIT_OK
    assert [r["verdict"] for r in reps] == ["Closed", "NotClosed"]
    assert reps[0]["orders"]["max_order"] == 10
    # flags override the file
    _, out, _ = run(capsys, "check", adapted, "--order", "8")
    assert json.loads(out)["orders"]["max_order"] == 8


def test_parse_error_exit(capsys):
    code, out, _ = run(capsys, "check", "--a", "z^", "--b", "1")
    rep = json.loads(out)
    assert code == EXIT_USAGE
    assert rep["error"]["type"] == "ParseError" and rep["error"]["position"] == 2
    assert rep["verdict"] is None


@pytest.mark.parametrize(
    "argv",
    [
        ["check"],
        ["check", "--a", "1"],
        ["check", *FIX_C, "--order", "5"],
        ["bogus"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == EXIT_USAGE


def test_bad_file(tmp_path, capsys):
    p = write(tmp_path, "x.ini", "[other]\na = 1\n")
    assert run(capsys, "check", p)[0] == EXIT_USAGE
    p = write(tmp_path, "y.ini", "[input]\nmode = cubic\nc0 = 1\n")
    assert run(capsys, "check", p)[0] == EXIT_USAGE
    assert run(capsys, "check", str(tmp_path / "missing.ini"))[0] == EXIT_USAGE


def test_degenerate_exit(capsys):
    code, out, _ = run(capsys, "check", "--a", "z", "--b", "1")
    assert code == EXIT_DEGENERATE
    assert json.loads(out)["error"]["type"] == "Degenerate"
    code, _, _ = run(capsys, "web", "--c0", "0", "--c1", "1", "--c2", "0", "--c3", "0")
    assert code == EXIT_DEGENERATE


def test_internal_inconsistency_exit(capsys, monkeypatch):
    import symdiff3.criteria as criteria

    monkeypatch.setattr(
        criteria, "oracle_decompose",
        lambda a, b, tol, unit_tol: criteria.OracleResult(False, 2, valid_order=8),
    )
    code, out, _ = run(capsys, "check", *FIX_C)
    assert code == EXIT_INTERNAL
    assert json.loads(out)["error"]["type"] == "InternalInconsistency"


def test_report_is_byte_stable(tmp_path, capsys):
    outs = [run(capsys, "check", *FIX_W)[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_generate_round_trip(tmp_path, capsys):
    code, text, _ = run(capsys, "generate", "--seed", "4")
    assert code == EXIT_OK
    path = write(tmp_path, "g.ini", text)
    _, out, _ = run(capsys, "check", path)
    assert json.loads(out)["verdict"] == "Closed"
    _, text, _ = run(capsys, "generate", "--seed", "4", "--perturb", "1")
    path = write(tmp_path, "p.ini", text)
    _, out, _ = run(capsys, "check", path)
    assert json.loads(out)["verdict"] == "NotClosed"
    assert run(capsys, "generate", "--seed", "4")[1] == run(capsys, "generate", "--seed", "4")[1]


def test_text_format(capsys):
    code, out, _ = run(capsys, "check", *FIX_W, "--format", "text")
    assert code == EXIT_OK
    assert "verdict: NotClosed" in out
    assert "thm1" in out and "oracle" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "symdiff3.cli", "check", *FIX_C],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Closed"
