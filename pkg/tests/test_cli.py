import json

import pandas as pd
import pytest

from core.cli import EXIT_FAILED_RUNS, EXIT_IO, EXIT_MODEL, main, parse_freeze, parse_theta
from core.models.path import Path
from core.models.spectrum import SampleSpectrum

FREEZE = ["rho_x=0.45", "sigma_x1=1", "sigma_x2=1", "beta=0.5", "gamma=0.5"]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("cli")
    path_fn = str(directory / "path.csv")
    assert main(["synth", "--setting", "rho0.45-orth", "--n", "1024", "--seed", "3", "--out", path_fn]) == 0
    spectrum_fn = str(directory / "spectrum.csv")
    assert main(["analyze", path_fn, "--out", spectrum_fn]) == 0
    return directory


def test_parsers():
    assert parse_theta("0.4,0.8,0.45,1,1,0.5,0.5").rho_x == 0.45
    assert parse_freeze("beta=0.25") == ("beta", 0.25)
    with pytest.raises(Exception):
        parse_theta("0.4,0.8")
    with pytest.raises(Exception):
        parse_freeze("alpha=1")


def test_synth_and_analyze_write_products(workdir):
    path = Path.from_csv(str(workdir / "path.csv"))
    assert path.n == 1024
    assert path.seed == 3
    assert path.theta_true.beta == 0.5
    spectrum = SampleSpectrum.from_csv(str(workdir / "spectrum.csv"))
    assert spectrum.js.tolist() == list(range(1, 8))
    assert spectrum.meta["settings"]["boundary"] == "truncate"
    assert list(spectrum.receipt["Module_Name"])[-3:] == ["from_csv", "analyze", "from_csv"]


def test_estimate_with_a_baseline(workdir):
    out = workdir / "uni.json"
    assert main(["estimate", str(workdir / "spectrum.csv"), "--method", "uni", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["method"] == "univariate"
    assert doc["theta_hat"]["beta"] is None
    assert 0.0 < doc["theta_hat"]["h1"] < 1.5


def test_estimate_to_stdout(workdir, capsys):
    assert main(["-q", "estimate", str(workdir / "spectrum.csv"), "--method", "eig", "--weights", "kj"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["method"] == "eigenvalue"
    assert doc["config"] == {"weights": "kj"}


def test_estimate_with_the_solver(workdir):
    out = workdir / "m.json"
    trace = workdir / "trace.csv"
    bounds = workdir / "bounds.json"
    argv = ["estimate", str(workdir / "spectrum.csv"), "--delta", "0.05", "--delta-relax", "4"]
    for item in FREEZE:
        argv += ["--freeze", item]
    argv += ["--out", str(out), "--trace", str(trace), "--dump-bounds", str(bounds)]
    assert main(argv) == 0
    doc = json.loads(out.read_text())
    assert doc["method"] == "M-BB"
    assert doc["theta_hat"]["gamma"] == 0.5
    assert doc["theta_hat"]["h1"] <= doc["theta_hat"]["h2"]
    assert doc["diagnostics"]["free_axes"] == ["h1", "h2"]
    assert doc["config"]["frozen"]["rho_x"] == 0.45
    assert "status" in pd.read_csv(trace).columns
    dump = json.loads(bounds.read_text())
    assert len(dump["terms"]) == 3 * 7
    assert dump["lower"] <= dump["upper"]


def test_model_errors_exit_with_2(tmp_path):
    out = str(tmp_path / "path.csv")
    assert main(["synth", "--setting", "rho0.10-nomix", "--n", "1000", "--out", out]) == EXIT_MODEL
    assert main(["synth", "--theta", "0.9,0.1,0,1,1,0,0", "--n", "1024", "--out", out]) == EXIT_MODEL


def test_missing_input_exits_with_1(tmp_path):
    missing = str(tmp_path / "missing.csv")
    assert main(["analyze", missing, "--out", str(tmp_path / "s.csv")]) == EXIT_IO
    assert main(["estimate", missing]) == EXIT_IO


def test_mc_then_normality(tmp_path):
    out_dir = tmp_path / "mc"
    argv = ["mc", "--out-dir", str(out_dir), "--settings", "rho0.45-orth", "--replications", "2"]
    argv += ["--n-list", "256", "--methods", "uni;eig", "--seed", "5"]
    assert main(argv) == 0
    runs = pd.read_csv(out_dir / "runs.csv")
    assert list(runs["seed"]) == [5, 5, 6, 6]
    assert (out_dir / "summary.csv").is_file()
    table_fn = tmp_path / "normality.csv"
    assert main(["normality", str(out_dir / "runs.csv"), "--out", str(table_fn)]) == 0
    table = pd.read_csv(table_fn)
    assert (table["status"] == "too-few").all()
    assert sorted(set(table["method"])) == ["eig", "uni"]


def test_mc_with_failed_runs_exits_with_3(tmp_path):
    settings = tmp_path / "settings.csv"
    settings.write_text("key,value\nj1,5\nj2,6\nmethods,uni\n")
    argv = ["mc", "--config", str(settings), "--out-dir", str(tmp_path / "mc")]
    argv += ["--settings", "rho0.10-nomix", "--replications", "1", "--n-list", "256"]
    with pytest.warns(UserWarning, match="runs failed"):
        assert main(argv) == EXIT_FAILED_RUNS
    runs = pd.read_csv(tmp_path / "mc" / "runs.csv")
    assert (runs["status"] == "failed").all()
