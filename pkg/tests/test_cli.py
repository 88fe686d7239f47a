import json
import subprocess
import sys

import pytest

from rieszsum.cli import main
from rieszsum.specfun import voronoi_kernel_I


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_voronoi(capsys):
    code, out, _ = run(["verify", "--case", "voronoi", "--x", "10.5", "--tol", "1e-3"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["converged"] is True
    assert rep["lhs"] == "2.7000000000000000e+01"


def test_gfun_matches_closed_form(capsys):
    code, out, _ = run(["gfun", "--m", "2", "--rho", "0", "--y", "1"], capsys)
    assert code == 0
    val = float(json.loads(out)["value"])
    assert abs(val - float(voronoi_kernel_I(1, 4.0))) < 1e-12


def test_q_must_be_prime(capsys):
    code, _, err = run(["verify", "--case", "t3_3", "--field", "Qsqrt:5", "--q", "4",
                        "--h", "1", "--rho", "1", "--x", "5.5"], capsys)
    assert code == 1
    assert "q must be prime" in err


def test_disc_alias_for_field_cases(capsys):
    code, _, err = run(["verify", "--case", "t3_3", "--disc", "5", "--q", "4", "--h", "1",
                        "--rho", "1", "--x", "5.5"], capsys)
    assert code == 1 and "q must be prime" in err


def test_usage_errors(capsys):
    assert run([], capsys)[0] == 1
    assert run(["verify", "--x", "3"], capsys)[0] == 1
    assert run(["frobnicate"], capsys)[0] == 1


def test_nonconvergence_exit_code(capsys):
    code, out, _ = run(["verify", "--case", "t3_3", "--field", "Qsqrt:5", "--q", "3",
                        "--h", "1", "--rho", "1", "--x", "5.5", "--max-n", "2000",
                        "--tol", "1e-9"], capsys)
    assert code == 2
    body = json.loads(out)
    assert body["error"] == "nonconvergence"
    assert body["best"]["converged"] is False


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("command = verify\ncase = voronoi\nx = 10.5\ntol = 1e-3\n")
    code, out, _ = run(["--config", str(cfg)], capsys)
    assert code == 0 and json.loads(out)["x"] == "1.0500000000000000e+01"
    code, out, _ = run(["--config", str(cfg), "--x", "12.5"], capsys)
    assert code == 0 and json.loads(out)["x"] == "1.2500000000000000e+01"


def test_json_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "rieszsum", "verify", "--case", "ramanujan",
                        "--q", "3", "--h", "1", "--x", "10.5", "--tol", "1e-3",
                        "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_numbers_have_17_significant_digits(capsys):
    _, out, _ = run(["verify", "--case", "voronoi", "--x", "10.5", "--tol", "1e-3"], capsys)
    rep = json.loads(out)
    for key in ("lhs", "rhs_main", "residual", "tail_estimate"):
        mantissa = rep[key].lstrip("-").split("e")[0].replace(".", "")
        assert len(mantissa) == 17


def test_scan_csv_rows(capsys):
    code, out, _ = run(["scan", "--case", "voronoi", "--x-min", "5.5", "--x-max", "7.5",
                        "--points", "3", "--tol", "1e-3", "--format", "csv"], capsys)
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 4
    assert lines[0].startswith("x,lhs,rhs_main")


def test_fit_json(capsys):
    code, out, _ = run(["fit", "--case", "t5_3", "--disc", "5", "--q", "3", "--h", "1",
                        "--rho", "1.25", "--format", "json"], capsys)
    assert code == 0
    summary = json.loads(out)
    assert summary["bounded_over_top_half"] is True
    assert float(summary["theory_slope"]) == pytest.approx(6.25 / 3 + 1 / 3)


def test_table_csv(capsys):
    code, out, _ = run(["table", "--field", "Qsqrt:5", "--n-max", "5", "--format", "csv"],
                       capsys)
    assert code == 0
    assert out.splitlines()[:3] == ["n,f_K,D_K", "1,1,1", "2,0,1"]
