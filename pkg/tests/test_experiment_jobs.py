"""End-to-end tests for the experiment jobs and the command line."""

import math
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from config import settings
from jobs.artifacts import csv_body
from jobs.experiment_jobs import run_experiment
from main import configure_logging, main
from services.exceptions import ArtifactIOError, InvalidInputError
from services.experiment_config import parse_config
from services.schedule_codec import read_schedule

FIG4_CONFIG = """
experiment = fig4
n_sites = 6
schedule.max_steps = 5
disorder.strengths = 0.02, 0.05
samples = 10
seed = 3
"""

FIG5_CONFIG = """
experiment = fig5
n_sites = 6
schedule.max_steps = 6
disorder.strengths = 0:0.1:0.3
samples = 12
seed = 8
"""


@pytest.fixture(autouse=True)
def reset_logging():
    yield
    configure_logging()


def _read(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def _comments(path: Path) -> dict:
    lines = [line[2:].rstrip("\n") for line in open(path) if line.startswith("# ")]
    return dict(line.split("=", 1) for line in lines)


class TestFig4:
    def test_rows_and_ideal_reference(self, tmp_path):
        (path,) = run_experiment(parse_config(FIG4_CONFIG), tmp_path)
        assert path == tmp_path / "fig4.csv"
        frame = _read(path)
        assert list(frame.columns) == ["delta", "k", "mean_F", "std_F"]
        assert len(frame) == 3 * 5
        assert sorted(frame["delta"].unique()) == [0.0, 0.02, 0.05]
        ideal = frame[frame["delta"] == 0.0]
        assert list(ideal["k"]) == [1, 2, 3, 4, 5]
        assert (ideal["std_F"] == 0.0).all()
        assert (frame["mean_F"].between(0.0, 1.0)).all()

    def test_header_comments(self, tmp_path):
        (path,) = run_experiment(parse_config(FIG4_CONFIG), tmp_path)
        comments = _comments(path)
        assert comments["experiment"] == "fig4"
        assert comments["seed"] == "3"
        assert len(comments["config_sha256"]) == 64
        assert not csv_body(path).startswith("#")

    def test_explicit_output_path(self, tmp_path):
        config = parse_config(FIG4_CONFIG + "output_path = curves/ensemble.csv\n")
        (path,) = run_experiment(config, tmp_path)
        assert path == tmp_path / "curves" / "ensemble.csv"
        assert path.exists()

    def test_relative_output_path_joins_settings_dir(self, tmp_path, monkeypatch):
        monkeypatch.setattr(settings, "output_dir", str(tmp_path / "res"))
        monkeypatch.chdir(tmp_path)
        config = parse_config(FIG4_CONFIG + "output_path = curves/ensemble.csv\n")
        (path,) = run_experiment(config)
        assert path == tmp_path / "res" / "curves" / "ensemble.csv"
        assert path.exists()
        assert not (tmp_path / "curves").exists()

    def test_absolute_output_path_is_kept(self, tmp_path):
        target = tmp_path / "abs" / "fig4.csv"
        config = parse_config(FIG4_CONFIG + f"output_path = {target}\n")
        (path,) = run_experiment(config, tmp_path / "ignored")
        assert path == target


class TestFig5:
    def test_columns(self, tmp_path):
        (path,) = run_experiment(parse_config(FIG5_CONFIG), tmp_path)
        frame = _read(path)
        assert list(frame.columns) == [
            "delta",
            "valve_mean_of_max",
            "valve_std",
            "valve_max_of_mean",
            "bose_mean",
            "bose_std",
        ]
        assert list(frame["delta"]) == [0.0, 0.1, 0.2, 0.3]
        assert frame["valve_std"].iloc[0] == 0.0
        assert frame["bose_std"].iloc[0] == 0.0
        assert (frame["valve_mean_of_max"] >= frame["bose_mean"] - 1e-4).all()
        assert "t_star" in _comments(path)

    def test_identical_across_runs_and_worker_counts(self, tmp_path, monkeypatch):
        config = parse_config(FIG5_CONFIG)
        (first,) = run_experiment(config, tmp_path / "a")
        monkeypatch.setattr(settings, "workers", 3)
        (second,) = run_experiment(config, tmp_path / "b")
        assert csv_body(first) == csv_body(second)
        assert first.read_bytes() == second.read_bytes()


class TestBose:
    def test_two_site_optimum(self, tmp_path):
        curve_path, optimum_path = run_experiment(parse_config("experiment = bose\nn_sites = 2"), tmp_path)
        curve = _read(curve_path)
        assert list(curve.columns) == ["t", "fidelity"]
        assert len(curve) == 400
        optimum = _read(optimum_path).iloc[0]
        assert optimum["t_star"] == pytest.approx(math.pi / 4, abs=1e-5)
        assert optimum["fidelity"] == pytest.approx(1.0, abs=1e-6)
        assert optimum["average_fidelity"] == pytest.approx(1.0, abs=1e-6)


class TestDesignAndReplay:
    def test_design_then_replay(self, tmp_path):
        (schedule_path,) = run_experiment(
            parse_config("experiment = design\nn_sites = 5\nschedule.max_steps = 4"), tmp_path
        )
        schedule = read_schedule(schedule_path.read_text())
        assert schedule.n_sites == 5
        assert len(schedule) == 4

        replay = parse_config(
            f"n_sites = 5\nschedule.path = {schedule_path}\nschedule.max_steps = 3\n"
            "disorder.strengths = 0.1\nsamples = 4"
        )
        (path,) = run_experiment(replay, tmp_path / "replay")
        frame = _read(path)
        assert len(frame) == 2 * 3
        ideal = frame[frame["delta"] == 0.0]["mean_F"].to_numpy()
        np.testing.assert_allclose(ideal, schedule.design_fidelities[:3], atol=1e-9)

    def test_replay_size_mismatch(self, tmp_path):
        (schedule_path,) = run_experiment(
            parse_config("experiment = design\nn_sites = 5\nschedule.max_steps = 2"), tmp_path
        )
        config = parse_config(f"n_sites = 6\nschedule.path = {schedule_path}")
        with pytest.raises(InvalidInputError):
            run_experiment(config, tmp_path)

    def test_missing_schedule_file(self, tmp_path):
        config = parse_config(f"n_sites = 6\nschedule.path = {tmp_path / 'absent.txt'}")
        with pytest.raises(ArtifactIOError):
            run_experiment(config, tmp_path)


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    config = parse_config(f"experiment = bose\nn_sites = 2\noutput_path = {blocker / 'bose.csv'}")
    with pytest.raises(ArtifactIOError):
        run_experiment(config, tmp_path)


class TestCommandLine:
    def _write_config(self, tmp_path: Path, text: str) -> Path:
        path = tmp_path / "experiment.cfg"
        path.write_text(text)
        return path

    def test_success_with_seed_override(self, tmp_path):
        config_path = self._write_config(tmp_path, FIG4_CONFIG)
        out = tmp_path / "out"
        assert main([str(config_path), "--output", str(out), "--seed", "7", "--quiet"]) == 0
        assert _comments(out / "fig4.csv")["seed"] == "7"

    def test_invalid_config(self, tmp_path, capsys):
        config_path = self._write_config(tmp_path, "samples = 0\n")
        assert main([str(config_path), "--quiet"]) == 1
        err = capsys.readouterr().err
        assert err.startswith("error: line 1, key 'samples'")

    def test_missing_config(self, tmp_path, capsys):
        assert main([str(tmp_path / "nope.cfg"), "--quiet"]) == 1
        assert capsys.readouterr().err.startswith("error: cannot read config")

    @pytest.mark.parametrize("seed", ["-1", str(2 ** 64)])
    def test_seed_out_of_range(self, tmp_path, seed):
        config_path = self._write_config(tmp_path, FIG4_CONFIG)
        assert main([str(config_path), "--seed", seed, "--quiet"]) == 2

    def test_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2
