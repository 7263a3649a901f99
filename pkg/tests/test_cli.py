"""Command-line interface: subcommands, exit codes, reproducible output."""

import csv
import io
import json
import subprocess
import sys

import pytest

from corrlab.cli import main

pytestmark = pytest.mark.filterwarnings("ignore::ResourceWarning")


def run_cli(args):
    """Invoke the CLI in-process, capturing stdout."""
    import contextlib

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


def run_cli_subprocess(args):
    proc = subprocess.run(
        [sys.executable, "-m", "corrlab.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_payoff_exact_joint():
    code, out = run_cli(["payoff", "--strategy", "joint", "--ensemble", "discrete6", "--exact"])
    assert code == 0
    assert out.splitlines()[0].startswith("payoff: 0.75")


def test_payoff_exact_local_hv():
    code, out = run_cli(["payoff", "--strategy", "local", "--axis", "HV", "--exact"])
    assert code == 0
    assert "payoff: 0.666667" in out


def test_payoff_monte_carlo_json():
    code, out = run_cli(
        ["payoff", "--shots", "20000", "--seed", "7", "--format", "json", "--workers", "1"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["schema_version"] == 1
    assert payload["config"]["seed"] == 7
    assert 0.7 < payload["results"]["overall"]["payoff"] < 0.8
    assert len(payload["results"]["per_state"]) == 12


def test_unknown_strategy_exits_2():
    code, out, err = run_cli_subprocess(["payoff", "--strategy", "localish"])
    assert code == 2
    assert "joint" in err and "local" in err and "helstrom" in err


def test_unknown_flag_exits_2():
    code, _, _ = run_cli_subprocess(["payoff", "--frobnicate"])
    assert code == 2


def test_fit_noise_prints_lambda():
    code, out = run_cli(["fit-noise", "--target", "0.72", "--model", "depolarizing"])
    assert code == 0
    assert "fitted lambda: 0.88" in out
    assert "0.97" in out


def test_fit_noise_out_of_range_exits_3(capsys):
    code, _ = run_cli(["fit-noise", "--target", "0.9"])
    assert code == 3


def test_cnot_verify():
    code, out = run_cli(["cnot-verify"])
    assert code == 0
    assert "0.111111" in out
    code, out = run_cli(["cnot-verify", "--format", "json"])
    payload = json.loads(out)
    assert abs(payload["results"]["success_probability"] - 1 / 9) < 1e-10
    assert payload["results"]["max_deviation_from_cnot"] < 1e-10
    assert payload["results"]["analyzer_map"]["A,V"] == "psi_minus"


def test_helstrom_command():
    code, out = run_cli(["helstrom", "--format", "json"])
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["results"]["payoff"] - 0.75) < 1e-10
    assert payload["results"]["max_expectation_gap"] < 1e-10


def test_fig3_exact_csv():
    code, out = run_cli(["fig3", "--exact"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 12
    joint = [float(r["theory_joint"]) for r in rows]
    assert joint == pytest.approx([1.0] * 6 + [0.5] * 6, abs=1e-12)
    local = [float(r["theory_local"]) for r in rows]
    assert local == pytest.approx([1.0, 1.0, 0.5, 0.5, 0.5, 0.5] * 2, abs=1e-12)
    # default noise is the fitted depolarizing weight
    sims = [float(r["simulated"]) for r in rows]
    assert all(abs(s - 0.97) < 1e-9 for s in sims[:6])
    assert all(abs(s - 0.47) < 1e-9 for s in sims[6:])


def test_fig3_monte_carlo():
    code, out = run_cli(["fig3", "--shots", "24000", "--seed", "3", "--workers", "2"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 12
    for r in rows[:6]:
        assert abs(float(r["simulated"]) - 0.97) < 0.02


def test_locc_search_command(tmp_path):
    log = tmp_path / "search.csv"
    code, out = run_cli(
        ["locc-search", "--ensemble", "uniform_sphere", "--resolution", "6",
         "--log", str(log), "--format", "json", "--workers", "1"]
    )
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["results"]["payoff"] - 2 / 3) < 1e-9
    with open(log, encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 36 * 36
    assert set(rows[0]) == {"theta_a", "phi_a", "theta_b", "phi_b", "rule_id", "payoff"}


def test_mutual_info_command():
    code, out = run_cli(
        ["mutual-info", "--variable", "alice_label", "--shots", "20000",
         "--seed", "11", "--format", "json", "--workers", "1", "--bootstrap", "50"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["results"]["bias_corrected_bits"] < 0.02
    assert payload["results"]["n_used"] == 20000


def test_seed_generated_and_echoed():
    code, out = run_cli(["payoff", "--shots", "1000", "--format", "json", "--workers", "1"])
    assert code == 0
    payload = json.loads(out)
    assert isinstance(payload["config"]["seed"], int)


def test_json_bytes_identical_across_runs_and_workers():
    base = ["payoff", "--shots", "30000", "--seed", "99", "--format", "json"]
    outputs = set()
    for workers in ("1", "4", "8", "1"):
        code, out, err = run_cli_subprocess(base + ["--workers", workers])
        assert code == 0, err
        outputs.add(out)
    assert len(outputs) == 1


def test_config_file_defaults_and_flag_override(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("# manifest\nstrategy=local\naxis=DA\nexact=true\n", encoding="utf-8")
    code, out = run_cli(["payoff", "--config", str(cfg)])
    assert code == 0
    assert "payoff: 0.666667" in out
    # explicit flag beats the config value
    code, out = run_cli(["payoff", "--config", str(cfg), "--strategy", "joint"])
    assert code == 0
    assert "payoff: 0.75" in out


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "run.conf"
    cfg.write_text("frobnicate=1\n", encoding="utf-8")
    code, _, err = run_cli_subprocess(["payoff", "--config", str(cfg)])
    assert code == 2
    assert "frobnicate" in err


def test_output_file_and_io_error(tmp_path):
    target = tmp_path / "report.json"
    code, _ = run_cli(["payoff", "--exact", "--format", "json", "--output", str(target)])
    assert code == 0
    payoff = json.loads(target.read_text())["results"]["overall"]["payoff"]
    assert payoff == pytest.approx(0.75, abs=1e-12)
    code, _ = run_cli(
        ["payoff", "--exact", "--output", str(tmp_path / "missing" / "sub" / "x.json")]
    )
    assert code == 4


def test_missing_config_file_is_io_error():
    code, _, _ = run_cli_subprocess(["payoff", "--config", "/nonexistent/path.conf"])
    assert code == 4
