"""Tests for experiment config parsing and process settings."""

import pytest
from pydantic import ValidationError

from config import Settings
from models.ensemble import DisorderKind
from models.protocol import FixedInterval, GreedyArrival
from services.exceptions import ConfigParseError
from services.experiment_config import config_fingerprint, parse_config


class TestParseConfig:
    def test_empty_file_gives_defaults(self):
        config = parse_config("")
        assert config.experiment == "fig4"
        assert config.n_sites == 20
        assert config.samples == 100
        assert config.seed == 0
        assert config.disorder.strengths == [0.0]
        assert config.schedule.max_steps == 20
        assert config.schedule_t_max() == 40.0
        assert config.bose_t_max() == 40.0
        assert isinstance(config.schedule.to_strategy(), GreedyArrival)
        spec = config.chain_spec()
        assert spec.n_sites == 20
        assert list(spec.couplings) == [1.0] * 19

    def test_full_file(self):
        text = """
        # gaussian coupling noise
        experiment = fig5
        n_sites = 8
        disorder.model = gaussian   # sigma = strength
        disorder.strengths = 0.02
        schedule.strategy = fixed(0.5)
        schedule.max_steps = 12
        schedule.t_max = 30
        samples = 50
        seed = 42
        """
        config = parse_config(text)
        assert config.experiment == "fig5"
        assert config.disorder.kind() is DisorderKind.GAUSSIAN_COUPLING
        assert config.disorder.strengths == [0.02]
        assert config.schedule.to_strategy() == FixedInterval(tau=0.5)
        assert config.schedule.max_steps == 12
        assert config.schedule_t_max() == 30.0
        assert (config.samples, config.seed) == (50, 42)

    def test_strength_range(self):
        config = parse_config("disorder.strengths = 0:0.05:0.5")
        assert len(config.disorder.strengths) == 11
        assert config.disorder.strengths[0] == 0.0
        assert config.disorder.strengths[-1] == 0.5

    def test_strength_list(self):
        config = parse_config("disorder.strengths = 0.05, 0.02")
        assert config.disorder.strengths == [0.05, 0.02]
        assert [m.strength for m in config.disorder.models()] == [0.05, 0.02]

    def test_chain_profiles(self):
        config = parse_config("n_sites = 3\ncoupling_profile = 1, 0.5\nonsite_profile = 0, 0.1, 0")
        spec = config.chain_spec()
        assert list(spec.couplings) == [1.0, 0.5]
        assert list(spec.onsite) == [0.0, 0.1, 0.0]
        assert parse_config("coupling_profile = uniform").coupling_profile is None

    def test_out_of_range_value_names_line_and_key(self):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config("samples = 0")
        assert excinfo.value.line == 1
        assert excinfo.value.key == "samples"
        assert "line 1, key 'samples'" in str(excinfo.value)

    @pytest.mark.parametrize(
        "text, line, key",
        [
            ("n_sites = 4\ncolour = red", 2, "colour"),
            ("n_sites 4", 1, None),
            ("seed = 1\nseed = 2", 2, "seed"),
            ("seed =", 1, "seed"),
            ("n_sites = 4\n\nschedule.strategy = sometimes", 3, "schedule.strategy"),
            ("disorder.model = pink", 1, "disorder.model"),
            ("disorder.strengths = 0.1, -0.1", 1, "disorder.strengths"),
            ("n_sites = 4\ncoupling_profile = 1, 1", 2, "coupling_profile"),
            ("seed = 18446744073709551616", 1, "seed"),
            ("experiment = fig6", 1, "experiment"),
        ],
    )
    def test_rejected_files(self, text, line, key):
        with pytest.raises(ConfigParseError) as excinfo:
            parse_config(text)
        assert excinfo.value.line == line
        assert excinfo.value.key == key

    def test_fingerprint_tracks_content(self):
        assert config_fingerprint(parse_config("seed = 1")) == config_fingerprint(parse_config("seed=1"))
        assert config_fingerprint(parse_config("seed = 1")) != config_fingerprint(parse_config("seed = 2"))


class TestSettings:
    def test_defaults(self, monkeypatch):
        for name in ("VALVE_WORKERS", "VALVE_LOG_LEVEL", "VALVE_CSV_PRECISION"):
            monkeypatch.delenv(name, raising=False)
        settings = Settings(_env_file=None)
        assert settings.workers == 1
        assert settings.csv_precision == 12

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("VALVE_WORKERS", "4")
        monkeypatch.setenv("VALVE_LOG_LEVEL", "DEBUG")
        settings = Settings(_env_file=None)
        assert settings.workers == 4
        assert settings.log_level == "DEBUG"

    def test_rejects_bad_precision(self, monkeypatch):
        monkeypatch.setenv("VALVE_CSV_PRECISION", "30")
        with pytest.raises(ValidationError):
            Settings(_env_file=None)
