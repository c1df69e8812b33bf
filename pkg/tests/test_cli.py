"""Command-line client: subcommands, exit codes, config merging, artifacts."""

import json
import math

import pytest
from click.testing import CliRunner

from modlat.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_zeta_command(runner):
    res = runner.invoke(main, ["zeta", "--m", "1", "--s", "2", "--tol", "1e-10"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert float(body["lower"]) <= math.pi ** 2 / 6 <= float(body["upper"])


def test_exit_code_rank_below_threshold(runner):
    res = runner.invoke(main, ["bound", "--m", "16", "--t", "5",
                               "--mode", "asymptotic"])
    assert res.exit_code == 2


def test_exit_code_enumeration_unavailable(runner):
    res = runner.invoke(main, ["enumerate", "--m", "23", "--x", "0.5"])
    assert res.exit_code == 3


def test_exit_code_precision_failure(runner):
    res = runner.invoke(main, ["zeta", "--m", "4", "--s", "2",
                               "--tol", "1e-12"])
    assert res.exit_code == 4


def test_bound_command_explicit(runner):
    res = runner.invoke(main, ["bound", "--m", "8", "--t", "20",
                               "--h0", "0.6"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["mode"] == "explicit"
    assert float(body["breakdown"]["h0"]) == 0.6
    assert 0 < float(body["eta_upper"]) < 1


def test_config_file_merging(runner, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m": 1, "s": 2.0, "tol": 1e-8}))
    # config supplies everything; explicit flag overrides one field
    res = runner.invoke(main, ["zeta", "--m", "1", "--s", "3",
                               "--config", str(cfg)])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["meta"]["config"]["s"] == "3.0"     # flag wins
    assert body["meta"]["config"]["tol"] == "1e-08"  # config survives defaults


def test_output_file(runner, tmp_path):
    out = tmp_path / "z.json"
    res = runner.invoke(main, ["zeta", "--m", "1", "--s", "2",
                               "-o", str(out)])
    assert res.exit_code == 0
    body = json.loads(out.read_text())
    assert "lower" in body


def test_enumerate_command(runner):
    res = runner.invoke(main, ["enumerate", "--m", "4", "--x", "0.7"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["n_orbits"] == len(body["orbits"]) > 0


def test_svbound_command(runner):
    res = runner.invoke(main, ["svbound", "--m", "16", "--t", "16",
                               "--epsilon", "0.2"])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert float(body["bracket"]["epsilon"]) == 0.2


def test_simulate_command_with_csv(runner, tmp_path):
    csv_path = tmp_path / "samples.csv"
    res = runner.invoke(main, ["simulate", "--m", "4", "--t", "4", "--p", "5",
                               "--s", "2", "--v", "6", "--n", "3",
                               "--seed", "5", "--samples-csv", str(csv_path)])
    assert res.exit_code == 0
    body = json.loads(res.output)
    assert body["report"]["n_samples"] == 3
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "index,lambda1,rho,seed"
    assert len(lines) == 4


def test_figure_command_csv(runner, tmp_path):
    out = tmp_path / "grid.csv"
    res = runner.invoke(main, ["figure", "--m", "8", "--t-min", "20",
                               "--t-max", "21", "-o", str(out)])
    assert res.exit_code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "m,t,ln_eta_upper"
    assert len(lines) == 3
    for line in lines[1:]:
        m, t, v = line.split(",")
        assert m == "8" and "." in v


def test_threads_flag_does_not_change_results(runner):
    args = ["bound", "--m", "8", "--t", "20", "--h0", "0.6"]
    r1 = runner.invoke(main, args + ["--threads", "1"])
    r2 = runner.invoke(main, args + ["--threads", "4"])
    assert r1.exit_code == r2.exit_code == 0
    assert r1.output == r2.output
