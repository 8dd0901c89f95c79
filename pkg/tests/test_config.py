# tests/test_config.py - Settings, experiment configuration and config files

import sys
import os
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest
from pydantic import ValidationError

from wallopt.config import (
    PROFILES,
    DevelopmentConfig,
    ExperimentConfig,
    ProductionConfig,
    Settings,
    TestingConfig,
    get_output_directory,
    get_settings,
    load_config_file,
)
from wallopt.errors import ConfigError


class TestSettings:
    """Environment-driven settings"""

    def test_defaults(self):
        """Optimizer constants"""
        s = Settings()
        assert s.penalty_factor == 1e15
        assert s.velocity_alpha == 10.0
        assert s.selection_window == 10

    def test_environment_prefix(self, monkeypatch):
        """WALLOPT_ variables override defaults"""
        monkeypatch.setenv("WALLOPT_MAX_WORKERS", "7")
        assert Settings().max_workers == 7

    @pytest.mark.parametrize("env, cls", [
        ("production", ProductionConfig),
        ("testing", TestingConfig),
        ("development", DevelopmentConfig),
        ("anything", DevelopmentConfig),
    ])
    def test_get_settings(self, monkeypatch, env, cls):
        """Environment selects the settings class"""
        monkeypatch.setenv("WALLOPT_ENVIRONMENT", env)
        assert type(get_settings()) is cls

    def test_output_directory(self, tmp_path):
        """Relative paths are made absolute"""
        assert os.path.isabs(get_output_directory("results"))
        assert get_output_directory(str(tmp_path)) == str(tmp_path)


class TestExperimentConfig:
    """Validated experiment batches"""

    def test_cases_sorted_unique(self):
        """Duplicate cases collapse"""
        assert ExperimentConfig(cases=[3, 1, 3]).cases == [1, 3]

    @pytest.mark.parametrize("field, value", [
        ("example", 3),
        ("cases", [0]),
        ("cases", []),
        ("objective", "volume"),
        ("algorithm", "ga"),
        ("runs", 0),
        ("population", 1),
    ])
    def test_invalid(self, field, value):
        """Out-of-range values fail validation"""
        with pytest.raises(ValidationError):
            ExperimentConfig(**{field: value})

    def test_empires_below_population(self):
        """FAGLSUD needs fewer empires than countries"""
        with pytest.raises(ValidationError):
            ExperimentConfig(population=10, empires=10)
        assert ExperimentConfig(algorithm="pso", population=10, empires=10).population == 10

    def test_case_insensitive_names(self):
        """Objective and algorithm names are lowered"""
        config = ExperimentConfig(objective="CO2", algorithm="PSO")
        assert (config.objective, config.algorithm) == ("co2", "pso")

    def test_profiles(self):
        """full and ci presets"""
        assert PROFILES["full"] == {"runs": 101, "iterations": 1000}
        config = ExperimentConfig.from_profile("ci", runs=None, seed=4)
        assert (config.runs, config.iterations, config.seed) == (11, 300, 4)

    def test_unknown_profile(self):
        """Unknown profile names are configuration errors"""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_profile("huge")


class TestConfigFile:
    """KEY=value experiment files"""

    def test_split(self, tmp_path):
        """Experiment keys and design symbols are separated"""
        path = tmp_path / "exp.cfg"
        path.write_text("algo=pso\ncase=1,4 7\niters=50\nH=4.5\nCs=0.6\n")
        experiment, parameters = load_config_file(str(path))
        assert experiment == {"algorithm": "pso", "cases": [1, 4, 7], "iterations": "50"}
        assert parameters == {"H": 4.5, "Cs": 0.6}

    def test_missing(self, tmp_path):
        """Missing files raise ConfigError"""
        with pytest.raises(ConfigError):
            load_config_file(str(tmp_path / "none.cfg"))

    def test_non_numeric_parameter(self, tmp_path):
        """Design symbols must be numeric"""
        path = tmp_path / "exp.cfg"
        path.write_text("H=tall\n")
        with pytest.raises(ConfigError):
            load_config_file(str(path))

    def test_bad_case_list(self, tmp_path):
        """Case lists must be integers"""
        path = tmp_path / "exp.cfg"
        path.write_text("cases=one,two\n")
        with pytest.raises(ConfigError):
            load_config_file(str(path))
