import json
import subprocess
import sys
from pathlib import Path

import pytest

from closedbch.cli import RunConfig, main

FIX = Path(__file__).parent / "fixtures"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


def test_classify_t1a(capsys):
    code, rep, _ = run_json(capsys, "classify", "--input", str(FIX / "t1a.json"))
    assert code == 0
    assert rep["summary"] == "T1a, D=6, free: e,n"


def test_classify_t1c_v(capsys):
    code, rep, _ = run_json(capsys, "classify", "--input", str(FIX / "t1c_v.json"))
    assert code == 0 and rep["type"] == "T1c_v" and rep["dimension"] == 4


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "--input", str(FIX / "t1a.json"), "--format", "text")
    assert code == 0 and "summary: T1a, D=6, free: e,n" in out


def test_malformed_exit_3(capsys):
    code, out, err = run(capsys, "classify", "--input", str(FIX / "malformed.json"))
    assert code == 3 and out == "" and "error" in err
    assert run(capsys, "classify", "--input", str(FIX / "missing.json"))[0] == 3
    assert run(capsys, "solve")[0] == 3


def test_jacobi_violation_exit_2(capsys):
    for cmd in ("classify", "solve", "verify"):
        assert run(capsys, cmd, "--input", str(FIX / "jacobi_bad.json"))[0] == 2


def test_solve_t5_two_entries(capsys):
    code, rep, _ = run_json(capsys, "solve", "--input", str(FIX / "t5.json"))
    assert code == 0 and len(rep["solutions"]) == 2
    assert {s["alpha_branch"] for s in rep["solutions"]} == {"factor_xu", "factor_xz"}
    for sol in rep["solutions"]:
        assert sol["residual"] < 1e-12
        assert {"u_tilde", "v_tilde", "c_tilde"} <= set(sol)


def test_solve_t4_up_to_two(capsys):
    code, rep, _ = run_json(capsys, "solve", "--input", str(FIX / "t4.json"))
    assert code == 0 and 1 <= len(rep["solutions"]) <= 2


def test_solve_t3a(capsys):
    code, rep, _ = run_json(capsys, "solve", "--input", str(FIX / "t3a.json"))
    (sol,) = rep["solutions"]
    assert sol["alpha"][0] == pytest.approx((0.1 + 0.2) / 0.2)


def test_no_admissible_alpha_exit_4(capsys, tmp_path):
    import numpy as np

    from closedbch.algebra import complete_spec

    z = 0.5
    beta = 2j * np.pi / -z
    sp = complete_spec("T2a", dict(c=0.1, d=0.1, z=z, p=-(1 - beta) * z))
    path = tmp_path / "inadmissible.json"
    path.write_text(json.dumps(sp.to_json_dict()))
    assert run(capsys, "solve", "--input", str(path))[0] == 4


def test_verify_sampled(capsys):
    code, rep, _ = run_json(capsys, "verify", "--type", "T1c_ii", "--seed", "3", "--tolerance", "1e-9")
    assert code == 0 and rep["pass"] and rep["worst"] < 1e-9


def test_verify_heisenberg_matrix_line(capsys):
    code, rep, _ = run_json(capsys, "verify", "--input", str(FIX / "heisenberg.json"), "--tolerance", "1e-12")
    assert code == 0 and rep["matrix"]["pass"] and rep["matrix"]["discrepancy"] < 1e-12


def test_verify_failure_exit_5(capsys):
    # parameters far outside the series' reach: the truncated oracle cannot agree
    code, _, err = run(capsys, "verify", "--type", "T5", "--scale", "3.0", "--tolerance", "1e-12")
    assert code == 5 and "worst discrepancy" in err


def test_verify_all(capsys):
    code, rep, _ = run_json(capsys, "verify", "--all")
    assert code == 0 and rep["count"] == 13 * 25 and rep["pass"]


def test_virasoro(capsys):
    code, rep, _ = run_json(capsys, "virasoro", "--k", "1", "--lm", "0.1", "--l0", "0.1", "--lk", "0.1")
    assert code == 0 and rep["checks"]["matrix"] < 1e-10
    code, rep, _ = run_json(capsys, "virasoro", "--k", "2", "--lm", "0.1", "--l0", "0", "--lk", "0.2",
                            "--central", "1.0")
    assert code == 0
    assert rep["c_k"][0] == pytest.approx(0.1 * 0.2 * (1.0 / 24) * 12)


def test_virasoro_k0_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["virasoro", "--k", "0"])
    assert exc.value.code == 2


def test_config_validation(capsys):
    with pytest.raises(ValueError):
        RunConfig(oracle_order=3)
    with pytest.raises(ValueError):
        RunConfig(tolerance=1e-3)
    with pytest.raises(SystemExit):
        main(["verify", "--type", "T4", "--order", "30"])


def test_deterministic_output_via_console_script():
    cmd = [sys.executable, "-m", "closedbch", "solve", "--type", "T4", "--seed", "9"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["type"] == "T4"


def test_bch_log_env(monkeypatch, capsys):
    monkeypatch.setenv("BCH_LOG", "info")
    assert main(["verify", "--all", "--seeds", "1"]) == 0
