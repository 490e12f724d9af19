"""Command-line interface, in-process."""

import json

import numpy as np
import pytest

from tvfi.cli import main
from tvfi.data import write_series_csv
from tvfi.simulate import DgpSpec, simulate_tvfi


@pytest.fixture()
def series_file(tmp_path):
    y = simulate_tvfi(DgpSpec(kind="constant", n=240, sigma=1.0, seed=13,
                              d=0.2))
    path = tmp_path / "y.csv"
    write_series_csv(path, y)
    return path


class TestSimulate:
    def test_writes_series_and_manifest(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc = main(["simulate", "--out", str(out), "--n", "60", "--kind",
                   "constant", "--d", "0.2", "--seed", "1"])
        assert rc == 0
        lines = (out / "y.csv").read_text().strip().split("\n")
        assert lines[0] == "y"
        assert len(lines) == 61
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "simulate"
        assert manifest["options"]["n"] == 60
        assert manifest["options"]["d"] == 0.2
        assert manifest["outputs"] == ["y.csv"]
        assert str(out / "manifest.json") in capsys.readouterr().out

    def test_byte_identical_reruns(self, tmp_path):
        args = ["--n", "50", "--kind", "linear_trend", "--seed", "9"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--out", str(a)] + args) == 0
        assert main(["simulate", "--out", str(b)] + args) == 0
        assert (a / "y.csv").read_bytes() == (b / "y.csv").read_bytes()
        assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()

    def test_flag_beats_config_beats_builtin(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"n": 70, "sigma": 1.0}))
        out = tmp_path / "out"
        rc = main(["simulate", "--out", str(out), "--config", str(cfg),
                   "--n", "50", "--kind", "constant", "--d", "0.1"])
        assert rc == 0
        assert len((out / "y.csv").read_text().strip().split("\n")) == 51
        opts = json.loads((out / "manifest.json").read_text())["options"]
        assert opts["n"] == 50        # flag wins
        assert opts["sigma"] == 1.0   # config beats builtin 2.0
        assert opts["seed"] == 0      # builtin fallback


class TestFit:
    def test_both_models(self, tmp_path, series_file):
        out = tmp_path / "fit"
        rc = main(["fit", "--out", str(out), "--data", str(series_file),
                   "--model", "both", "--multistart", "1"])
        assert rc == 0
        tv = json.loads((out / "fit_tvfi.json").read_text())
        assert tv["model"] == "tvfi"
        assert np.isfinite(tv["loglik"])
        fi = json.loads((out / "fit_fi.json").read_text())
        assert fi["model"] == "fi"
        assert abs(fi["d_hat"]) < 0.6
        report = (out / "fit_report.txt").read_text()
        assert "loglik" in report

    def test_missing_data_fails_cleanly(self, tmp_path, capsys):
        rc = main(["fit", "--out", str(tmp_path / "x")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file_fails_cleanly(self, tmp_path, capsys):
        rc = main(["fit", "--out", str(tmp_path / "x"), "--data",
                   str(tmp_path / "nope.csv")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestForecast:
    def test_benchmark_model_draws(self, tmp_path, series_file):
        out = tmp_path / "fc"
        rc = main(["forecast", "--out", str(out), "--data", str(series_file),
                   "--model", "fi", "--horizon", "3", "--n-sims", "500"])
        assert rc == 0
        rows = (out / "forecast_draws.csv").read_text().strip().split("\n")
        assert rows[0] == "horizon,draw"
        assert len(rows) == 1 + 3 * 500
        summary = json.loads((out / "forecast_summary.json").read_text())
        assert summary["model"] == "fi"
        assert set(summary["sample_means"]) == {"1", "2", "3"}
        assert np.isfinite(summary["one_step_mean"])
        assert summary["one_step_sd"] > 0


class TestEval:
    def test_small_rolling_run(self, tmp_path, series_file):
        out = tmp_path / "ev"
        rc = main(["eval", "--out", str(out), "--data", str(series_file),
                   "--initial-window", "200", "--refit-every", "50",
                   "--horizons", "1,2", "--n-sims", "400",
                   "--multistart", "1"])
        assert rc == 0
        n_origins = 240 - 2 + 1 - 200
        rows = (out / "eval_scores.csv").read_text().strip().split("\n")
        assert len(rows) == 1 + 4 * n_origins
        summary = (out / "eval_summary.csv").read_text().strip().split("\n")
        assert len(summary) == 3
        cs = (out / "eval_cs.csv").read_text().strip().split("\n")
        assert len(cs) == 1 + n_origins

    def test_window_longer_than_series_fails_cleanly(self, tmp_path,
                                                     series_file, capsys):
        rc = main(["eval", "--out", str(tmp_path / "x"), "--data",
                   str(series_file), "--initial-window", "239",
                   "--horizons", "1,2"])
        assert rc == 1
        assert "error:" in capsys.readouterr().err


class TestTopLevel:
    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip() == "0.1.0"

    def test_unknown_choice_rejected_by_parser(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["simulate", "--out", str(tmp_path), "--kind", "sawtooth"])
