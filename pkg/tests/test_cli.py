import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from clifract import fif_from_data, fixed_point
from clifract.cli import main

CONSTANT_CONFIG = {
    "schema_version": 1,
    "n": 2,
    "grid_M": 16,
    "partition": {"interval": [0.0, 1.0], "N": 2},
    "q": [
        {"": {"const": 1.0}, "12": {"const": -2.0}},
        {"": {"const": 1.0}, "12": {"const": -2.0}},
    ],
    "s": [0.5, 0.5],
    "tol": 1e-12,
    "space": {"tag": "Lp", "p": 1.0},
}

FIF_CONFIG = {
    "schema_version": 1,
    "n": 0,
    "grid_M": 1024,
    "fif": {"x": [0.0, 0.5, 1.0], "y": [0.0, 1.0, 0.0]},
    "s": [0.3, 0.3],
    "tol": 1e-12,
    "space": {"tag": "Ck", "k": 0},
    "seed": 5,
}


def write_config(tmp_path, payload, name="problem.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=2))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(cell) for cell in row] for row in rows[1:]]


def test_solve_constant_config_writes_expected_columns(tmp_path, capsys):
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    out = tmp_path / "solution.csv"
    assert main(["solve", str(cfg), "--output", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["x", "", "1", "2", "12"]
    matrix = np.array(rows)
    np.testing.assert_allclose(matrix[:, 1], 2.0, atol=1e-11)   # 1/(1-0.5)
    np.testing.assert_allclose(matrix[:, 4], -4.0, atol=1e-11)  # -2/(1-0.5)
    np.testing.assert_array_equal(matrix[:, 2], 0.0)
    np.testing.assert_array_equal(matrix[:, 3], 0.0)
    report = capsys.readouterr().out
    assert "iterations:" in report and "empirical gamma:" in report


def test_solve_report_quiet(tmp_path, capsys):
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    out = tmp_path / "solution.csv"
    assert main(["solve", str(cfg), "--output", str(out), "--quiet"]) == 0
    assert capsys.readouterr().out == ""


def test_solve_fif_reproduces_knots_through_cli(tmp_path):
    cfg = write_config(tmp_path, FIF_CONFIG)
    out = tmp_path / "fif.csv"
    assert main(["solve", str(cfg), "--output", str(out)]) == 0
    _, rows = read_csv(out)
    matrix = np.array(rows)
    by_x = dict(zip(matrix[:, 0], matrix[:, 1]))
    assert abs(by_x[0.0] - 0.0) < 1e-10
    assert abs(by_x[0.5] - 1.0) < 1e-10
    assert abs(by_x[1.0] - 0.0) < 1e-10


def test_cli_matches_library_solution(tmp_path):
    cfg = write_config(tmp_path, FIF_CONFIG)
    out = tmp_path / "fif.csv"
    main(["solve", str(cfg), "--output", str(out), "--quiet"])
    _, rows = read_csv(out)
    params = fif_from_data([0.0, 0.5, 1.0], [0.0, 1.0, 0.0], [0.3, 0.3])
    psi = fixed_point(params, 1024, tol=1e-12, gamma=0.3).function
    np.testing.assert_array_equal(np.array(rows)[:, 1], psi.values)


def test_solve_json_format_round_trips(tmp_path):
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    out = tmp_path / "solution.json"
    assert main(["solve", str(cfg), "--output", str(out), "--format", "json"]) == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 17
    assert set(rows[0]["coeffs"]) == {"", "1", "2", "12"}
    assert rows[0]["coeffs"][""] == pytest.approx(2.0, abs=1e-11)


def test_solve_gate_failure_exits_3_without_output(tmp_path, capsys):
    failing = json.loads(json.dumps(CONSTANT_CONFIG))
    failing["s"] = [1.25, 1.25]
    cfg = write_config(tmp_path, failing)
    out = tmp_path / "nope.csv"
    assert main(["solve", str(cfg), "--output", str(out)]) == 3
    assert not out.exists()
    assert "gate failed" in capsys.readouterr().err


def test_solve_non_convergence_exits_3(tmp_path, capsys):
    stubborn = json.loads(json.dumps(FIF_CONFIG))
    stubborn["max_iter"] = 2
    cfg = write_config(tmp_path, stubborn)
    out = tmp_path / "never.csv"
    assert main(["solve", str(cfg), "--output", str(out)]) == 3
    assert not out.exists()
    assert "no convergence" in capsys.readouterr().err


def test_solve_config_error_exits_2(tmp_path, capsys):
    broken = json.loads(json.dumps(CONSTANT_CONFIG))
    del broken["s"]
    cfg = write_config(tmp_path, broken)
    assert main(["solve", str(cfg)]) == 2
    assert "s" in capsys.readouterr().err


def test_solve_missing_file_exits_2(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "ghost.json")]) == 2
    assert "config error" in capsys.readouterr().err


def test_output_dir_env_var_anchors_relative_paths(tmp_path, monkeypatch):
    outdir = tmp_path / "results"
    monkeypatch.setenv("CLIFRACT_OUTPUT_DIR", str(outdir))
    monkeypatch.chdir(tmp_path)
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    assert main(["solve", str(cfg), "--quiet"]) == 0
    assert (outdir / "problem.out.csv").exists()


def test_check_reports_all_six_gates(tmp_path, capsys):
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    assert main(["check", str(cfg)]) == 0
    out = capsys.readouterr().out
    for tag in ("Ck", "CkAlpha", "Lp", "Wsp", "Bspq", "Fspq"):
        assert tag in out
    # Lp gate with p=1, Lip=1/2, s=0.5: 2 * 0.5 * 0.5
    assert "configured Lp(p=1.0): gamma = 0.5 (passes)" in out


def test_check_zero_multipliers_all_gates_vanish(tmp_path, capsys):
    payload = json.loads(json.dumps(CONSTANT_CONFIG))
    payload["s"] = [0.0, 0.0]
    cfg = write_config(tmp_path, payload)
    assert main(["check", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    gate_lines = [ln for ln in lines[1:7]]
    assert all(" 0 " in ln or ln.rstrip().endswith("yes") for ln in gate_lines)


def test_check_failing_sup_gate_exits_1(tmp_path, capsys):
    payload = json.loads(json.dumps(CONSTANT_CONFIG))
    payload["s"] = [0.6, 0.6]
    payload["space"] = {"tag": "Ck", "k": 0}
    cfg = write_config(tmp_path, payload)
    assert main(["check", str(cfg)]) == 1
    out = capsys.readouterr().out
    assert "gamma = 1.2 (FAILS)" in out


def test_eval_exact_and_interpolated(tmp_path, capsys):
    cfg = write_config(tmp_path, FIF_CONFIG)
    out = tmp_path / "fif.csv"
    main(["solve", str(cfg), "--output", str(out), "--quiet"])
    _, rows = read_csv(out)
    stored = {row[0]: row[1] for row in rows}

    grid1 = 1.0 / 1024
    midpoint = grid1 / 2.0
    assert main(["eval", str(out), "--at", f"0.5,{grid1!r},{midpoint!r}"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].split(",") == ["x", "value", "source"]
    at_half = lines[1].split(",")
    assert at_half[2] == "grid"
    assert float(at_half[1]) == stored[0.5]  # bit-exact round trip
    at_grid1 = lines[2].split(",")
    assert at_grid1[2] == "grid"
    assert float(at_grid1[1]) == stored[grid1]
    between = lines[3].split(",")
    assert between[2] == "interpolated"
    assert float(between[1]) == pytest.approx((stored[0.0] + stored[grid1]) / 2.0, rel=1e-15)


def test_eval_first_row_at_domain_start(tmp_path, capsys):
    cfg = write_config(tmp_path, FIF_CONFIG)
    out = tmp_path / "fif.csv"
    main(["solve", str(cfg), "--output", str(out), "--quiet"])
    assert main(["eval", str(out), "--at", "0.0"]) == 0
    line = capsys.readouterr().out.strip().splitlines()[1]
    assert line.endswith("grid")


def test_eval_out_of_domain_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, FIF_CONFIG)
    out = tmp_path / "fif.csv"
    main(["solve", str(cfg), "--output", str(out), "--quiet"])
    assert main(["eval", str(out), "--at", "1.5"]) == 2
    assert "outside the domain" in capsys.readouterr().err


def test_eval_reads_json_solutions(tmp_path, capsys):
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    out = tmp_path / "solution.json"
    main(["solve", str(cfg), "--output", str(out), "--format", "json", "--quiet"])
    assert main(["eval", str(out), "--at", "0.5"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "x,,1,2,12,source"
    values = lines[1].split(",")
    assert float(values[1]) == pytest.approx(2.0, abs=1e-11)


def test_solve_outputs_are_byte_identical_across_runs(tmp_path):
    cfg = write_config(tmp_path, FIF_CONFIG)
    outs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        code = subprocess.run(
            [sys.executable, "-m", "clifract", "solve", str(cfg), "--output", str(out), "--quiet"],
            cwd=tmp_path,
        ).returncode
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_csv_uses_crlf_line_endings(tmp_path):
    cfg = write_config(tmp_path, CONSTANT_CONFIG)
    out = tmp_path / "solution.csv"
    main(["solve", str(cfg), "--output", str(out), "--quiet"])
    raw = out.read_bytes()
    assert raw.count(b"\r\n") == 18  # header + 17 sample rows
