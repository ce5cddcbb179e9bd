import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

import suites
from config import Config
from main import cli
from report import CheckRecord, Report
from scalar import Q_INV, GaussQ, QScalar


@pytest.fixture
def runner():
    return CliRunner()


def _lines(result):
    return result.output.splitlines()


def test_normal_order(runner):
    result = runner.invoke(cli, ["normal-order", "--space", "quantum_plane", "X1*X2"])
    assert result.exit_code == 0, result.output
    assert "q*X2*X1" in _lines(result)


def test_normal_order_with_grassmann_symbols(runner):
    result = runner.invoke(cli, ["normal-order", "--space", "quantum_plane", "theta1 - theta1"])
    assert result.exit_code == 0
    assert "0" in _lines(result)


@pytest.mark.parametrize(
    "args",
    [
        ["normal-order", "--space", "sphere", "X1"],
        ["normal-order", "--space", "quantum_plane", "X1 +"],
        ["normal-order", "--space", "euclid4", "P1*X1"],
        ["star", "--space", "quantum_plane", "X1", "P1"],
    ],
)
def test_domain_errors_exit_with_two(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 2


def test_star(runner):
    result = runner.invoke(cli, ["star", "--space", "quantum_plane", "X1", "X2"])
    assert result.exit_code == 0
    assert "q*X2*X1" in _lines(result)


def test_qexp(runner):
    result = runner.invoke(cli, ["qexp", "--space", "quantum_plane", "--degree", "1", "--check"])
    assert result.exit_code == 0, result.output
    lines = _lines(result)
    assert "(1 | 1) : 1" in lines
    assert any(line.startswith("(X1 | P2) : ") for line in lines)
    assert "# residual: 0" in lines
    assert "# classical limit: ok" in lines


def test_qexp_rejects_negative_degree(runner):
    result = runner.invoke(cli, ["qexp", "--space", "quantum_plane", "--degree", "-1"])
    assert result.exit_code == 2


def test_grassmann_table(runner):
    result = runner.invoke(cli, ["grassmann", "form", "--space", "quantum_plane", "--variant", "L"])
    assert result.exit_code == 0
    assert "1 * conj(f') * g_{2,1}" in _lines(result)


def test_grassmann_flagged_lines_are_marked(runner):
    result = runner.invoke(cli, ["grassmann", "form", "--space", "minkowski", "--variant", "Lbar"])
    assert result.exit_code == 0
    assert any("# total degree 3" in line for line in _lines(result))


def test_grassmann_form_value(runner):
    result = runner.invoke(
        cli, ["grassmann", "form", "--space", "quantum_plane", "--variant", "L", "--f", "theta1", "--g", "theta1"]
    )
    assert result.exit_code == 0
    assert QScalar.q_power(Fraction(-1, 2)).render() in _lines(result)


def test_grassmann_gram(runner):
    result = runner.invoke(cli, ["grassmann", "form", "--space", "quantum_plane", "--variant", "L", "--gram"])
    assert result.exit_code == 0
    assert Q_INV.render() in _lines(result)


def test_grassmann_needs_both_arguments(runner):
    result = runner.invoke(cli, ["grassmann", "form", "--space", "quantum_plane", "--variant", "L", "--f", "theta1"])
    assert result.exit_code == 2


@pytest.fixture
def lattice_files(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"space": "quantum_plane", "q": "2", "window": 0, "sectors": [[1, 1]], "exact": True}))
    samples = tmp_path / "samples.csv"
    samples.write_text("s_1,s_2,v_1,v_2,re,im\n1,1,0,0,1,0\n")
    return str(spec), str(samples)


def test_integrate(runner, lattice_files):
    spec, samples = lattice_files
    result = runner.invoke(cli, ["integrate", "--spec", spec, "--input", samples])
    assert result.exit_code == 0, result.output
    lines = _lines(result)
    # (q^2 - 1)^2 at q = 2
    assert "9" in lines
    assert any(line.startswith("# window:") for line in lines)


def test_integrate_combined(runner, lattice_files):
    spec, samples = lattice_files
    result = runner.invoke(cli, ["integrate", "--spec", spec, "--input", samples, "--combined", "1"])
    assert result.exit_code == 0
    assert GaussQ(0, 9).render() in _lines(result)


def test_integrate_rejects_points_outside_the_window(runner, lattice_files, tmp_path):
    spec, _ = lattice_files
    samples = tmp_path / "outside.csv"
    samples.write_text("s_1,s_2,v_1,v_2,re,im\n1,1,4,0,1,0\n")
    result = runner.invoke(cli, ["integrate", "--spec", spec, "--input", str(samples)])
    assert result.exit_code == 2


def test_verify_writes_a_report(runner, tmp_path):
    path = tmp_path / "report.json"
    result = runner.invoke(cli, ["verify", "--suite", "grassmann", "--seed", "1", "--json", str(path)])
    assert result.exit_code == 0, result.output
    data = json.loads(path.read_text())
    assert data["suite"] == "grassmann" and data["seed"] == 1
    assert any(line.startswith("NOTE grassmann.minkowski.flagged") for line in _lines(result))


def test_verify_exit_codes(runner, monkeypatch):
    def fake(name, q_value=None, seed=None, window=None):
        checks = [CheckRecord(id="x.one", paper_ref="2dimQuan", anchor="a", status="fail", witness="3")]
        return Report(suite=name, q=1.1, seed=0, window=6, checks=checks)

    monkeypatch.setattr(suites, "run_suite", fake)
    result = runner.invoke(cli, ["verify", "--suite", "algebra"])
    assert result.exit_code == 1
    assert "FAIL x.one [2dimQuan]: a (3)" in _lines(result)


def test_verify_unknown_suite(runner):
    assert runner.invoke(cli, ["verify", "--suite", "geometry"]).exit_code == 2
    assert runner.invoke(cli, ["verify", "--suite", "lattice", "--q", "1"]).exit_code == 2


def test_configuration_errors_stop_the_cli(runner, monkeypatch):
    monkeypatch.setattr(Config, "Q_VALUE", None)
    result = runner.invoke(cli, ["normal-order", "--space", "quantum_plane", "X1"])
    assert result.exit_code == 2


def test_log_level_option(runner):
    result = runner.invoke(cli, ["--log-level", "warning", "normal-order", "--space", "quantum_plane", "X2"])
    assert result.exit_code == 0
    assert "X2" in _lines(result)
