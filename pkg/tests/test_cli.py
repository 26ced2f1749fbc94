import csv
import io
import math
import subprocess
import sys

import numpy as np
import pytest

from dickelab.cli import fmt, main, parse_values
from dickelab.thresholds import lambda_c_collective


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(3) == "3" and fmt(True) == "True" and fmt(None) == ""


def test_parse_values():
    assert np.allclose(parse_values("1,2.5"), [1, 2.5])
    assert np.allclose(parse_values("0:1:3"), [0, 0.5, 1])
    assert np.allclose(parse_values("1:100:3:log"), [1, 10, 100])


def test_threshold(capsys):
    code, out, _ = run(["threshold", "--omega_c", "1", "--omega_z", "1", "--kappa", "0.5",
                        "--method", "collective"], capsys)
    assert code == 0
    (row,) = rows_of(out)
    assert float(row["lambda_c"]) == lambda_c_collective(1, 1, 0.5).lambda_c


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "model.cfg"
    cfg.write_text("omega_c = 2\nkappa = 0.5\nomega_z = 1\n")
    _, out, _ = run(["--config", str(cfg), "threshold", "--kappa", "0", "--method", "collective"], capsys)
    assert float(rows_of(out)[0]["lambda_c"]) == pytest.approx(0.5 * math.sqrt(2))


def test_global_flags_after_subcommand(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["threshold", "--out", str(out), "--method", "equilibrium"]) == 0
    text = out.read_bytes()
    assert b"\r\n" not in text and text.startswith(b"method,lambda_c,exists,error\n")


def test_invalid_params_exit_code(capsys):
    code, _, err = run(["threshold", "--kappa", "-1"], capsys)
    assert code == 2 and "NegativeRate" in err


def test_stability_summary(capsys):
    _, out, _ = run(["stability", "--lambda", "2", "--kappa", "0.5"], capsys)
    summary = rows_of(out)[-1]
    assert summary["phase"] == "SR" and summary["stable"] == "False"


def test_sweep_writes_plot_script(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--lambda", "0.9", "--kappa", "0.5", "--gamma_down", "0.1",
                 "--values", "10,100", "--out", str(out), "--log"]) == 0
    rows = rows_of(out.read_text())
    assert [r["N"] for r in rows] == ["10", "100"]
    script = (tmp_path / "sweep_plot.py").read_text()
    compile(script, "sweep_plot.py", "exec")
    assert "sweep.csv" in script and "xscale" in script


def test_steadystate_exact(capsys):
    _, out, _ = run(["steadystate", "--lambda", "0.3", "--kappa", "1", "--n_atoms", "3"], capsys)
    row = rows_of(out)[0]
    assert float(row["n_ph"]) > 0 and int(row["photon_cutoff"]) >= 10


def test_dynamics_cumulant_columns(capsys):
    _, out, _ = run(["dynamics", "--method", "cumulant", "--lambda", "0.5", "--kappa", "0.5",
                     "--t-final", "1", "--samples", "3"], capsys)
    rows = rows_of(out)
    assert len(rows) == 3 and "aa_re" in rows[0] and "aa_im" in rows[0]


def test_phasediagram(capsys):
    _, out, _ = run(["phasediagram", "--omega_c", "0.1", "--lambda", "0.9", "--kappa", "0.5",
                     "--x", "lambda_prime", "0", "4", "3", "--y", "gamma_up", "0", "0.5", "2",
                     "--hold-gamma-t", "0.5"], capsys)
    rows = rows_of(out)
    assert len(rows) == 6 and {r["phase"] for r in rows} <= {"N", "SR", "CL", "RL"}


def test_landau_is_deterministic(capsys):
    args = ["--seed", "5", "landau", "cpt", "--values", "0.5,1,2", "--t-total", "50"]
    first = run(args, capsys)[1]
    assert run(args, capsys)[1] == first
    assert run(["--seed", "6"] + args[2:], capsys)[1] != first
    assert rows_of(first)[-1]["stiffness"] == "fit"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "dickelab", "threshold", "--method", "equilibrium"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.splitlines()[1].startswith("equilibrium,0.5,")
