"""End-to-end CLI checks on cheap circle and coarse-sphere problems."""

import csv
import json

import pytest
from click.testing import CliRunner

from laplacenet.cli import main

CIRCLE_SWEEP = ["--manifold", "circle:1", "--eps", "0.5,0.3,0.2",
                "--rho-rule", "pow:1.5,0.5", "--k", "5", "--seed", "11",
                "--oversample", "100"]


@pytest.fixture()
def runner():
    return CliRunner()


def test_version(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0
    assert "laplacenet" in res.output


def test_net_and_spectrum(runner, tmp_path):
    net_path = tmp_path / "net.json"
    res = runner.invoke(main, ["net", "--manifold", "circle:1", "--eps", "0.3",
                               "--seed", "3", "--out", str(net_path)])
    assert res.exit_code == 0, res.output
    assert "N=" in res.output
    d = json.loads(net_path.read_text())
    assert d["manifold"] == "circle:1" and d["seed"] == 3

    res = runner.invoke(main, ["spectrum", "--net", str(net_path),
                               "--rho", "0.8", "--k", "4"])
    assert res.exit_code == 0, res.output
    lines = [l for l in res.output.splitlines() if l.startswith("lambda_")]
    assert len(lines) == 4
    lam1 = float(lines[0].split("=")[1].split()[0])
    assert abs(lam1) < 1e-10


def test_net_error_exit(runner, tmp_path):
    res = runner.invoke(main, ["net", "--manifold", "circle:1", "--eps", "5.0",
                               "--out", str(tmp_path / "x.json")])
    assert res.exit_code == 1
    assert "error:" in res.output


def test_converge_with_flags(runner, tmp_path):
    out = tmp_path / "rep"
    res = runner.invoke(main, ["converge", *CIRCLE_SWEEP,
                               "--format", "both", "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert "slope" in res.output
    rows = list(csv.reader((out / "report.csv").open()))
    assert rows[0][0] == "level"
    assert len(rows) == 1 + 3 * 5
    rep = json.loads((out / "report.json").read_text())
    assert len(rep["levels"]) == 3


def test_converge_with_config_file(runner, tmp_path):
    cfg = {"manifold": "circle:1", "eps_levels": [0.5, 0.3],
           "rho_rule": "pow:1.5,0.5", "k_target": 3, "seed": 11,
           "oversample": 100}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    out = tmp_path / "rep"
    res = runner.invoke(main, ["converge", "--config", str(p),
                               "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert (out / "report.csv").exists()


def test_converge_usage_error(runner):
    res = runner.invoke(main, ["converge", "--manifold", "circle:1"])
    assert res.exit_code != 0
    assert "--config" in res.output


def test_eigenfunctions(runner, tmp_path):
    out = tmp_path / "align.json"
    res = runner.invoke(main, ["eigenfunctions", *CIRCLE_SWEEP,
                               "--cluster-gap", "0.2", "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert "cluster lambda=" in res.output
    d = json.loads(out.read_text())
    assert d["clusters"][0]["multiplicity"] == 1  # constant mode
    # lambda=1 pair on the unit circle.
    pair = [c for c in d["clusters"] if c["lambda"] == 1.0]
    assert pair and pair[0]["multiplicity"] == 2
    assert pair[0]["levels"], "no levels reported"


def test_diagnostics_csv(runner, tmp_path):
    out = tmp_path / "diag.csv"
    res = runner.invoke(main, [
        "diagnostics", "--manifold", "circle:1", "--eps", "0.3,0.2",
        "--rho-rule", "fixed:0.9", "--k", "4", "--seed", "11",
        "--oversample", "100", "--lemmas", "3.4,4.3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["level", "lemma_id", "r_or_rho", "lhs",
                       "rhs_envelope", "fitted_constant"]
    assert [r[1] for r in rows[1:]] == ["3.4", "4.3", "3.4", "4.3"]


def test_diagnostics_skips_levels_without_interpolation(runner):
    res = runner.invoke(main, [
        "diagnostics", "--manifold", "circle:1", "--eps", "0.45,0.2",
        "--rho-rule", "fixed:0.9", "--k", "3", "--seed", "11",
        "--oversample", "100", "--lemmas", "4.3"])
    assert res.exit_code == 0, res.output
    assert "skipped" in res.output  # 0.9 <= 2 * 0.45


def test_diagnostics_unknown_lemma(runner):
    res = runner.invoke(main, ["diagnostics", *CIRCLE_SWEEP,
                               "--lemmas", "9.9"])
    assert res.exit_code == 1
    assert "unknown diagnostic ids" in res.output
