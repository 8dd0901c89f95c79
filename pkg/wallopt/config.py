# wallopt/config.py - Configuration management

import os
from typing import Dict, List, Optional, Tuple

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings

from wallopt.errors import ConfigError


class Settings(BaseSettings):
    # Application
    app_name: str = "Retaining Wall Optimizer"
    app_version: str = "1.0.0"
    debug: bool = False

    # Experiment defaults
    default_runs: int = 101
    default_iterations: int = 1000
    default_population: int = 50
    default_empires: int = 20
    root_seed: int = 20220101
    output_directory: str = "results"
    max_workers: int = 4

    # Optimizer constants
    penalty_factor: float = 1e15
    velocity_alpha: float = 10.0
    selection_window: int = 10

    # Baselines
    pso_inertia_start: float = 1.0
    pso_inertia_damping: float = 0.99
    pso_c1: float = 1.5
    pso_c2: float = 2.0
    pso_velocity_fraction: float = 0.1
    de_scale_factor: float = 0.2
    de_crossover: float = 0.01

    # Logging
    log_level: str = "INFO"
    log_file: Optional[str] = None
    enable_performance_logging: bool = True

    model_config = ConfigDict(env_file=".env", env_prefix="WALLOPT_")


# Global settings instance
settings = Settings()


def get_output_directory(path: Optional[str] = None) -> str:
    """Get absolute path for the results directory"""
    target = path or settings.output_directory
    if not os.path.isabs(target):
        return os.path.abspath(target)
    return target


# Environment-specific configurations
class DevelopmentConfig(Settings):
    debug: bool = True
    log_level: str = "DEBUG"


class ProductionConfig(Settings):
    debug: bool = False
    log_level: str = "WARNING"


class TestingConfig(Settings):
    debug: bool = True
    log_level: str = "DEBUG"
    default_runs: int = 3
    default_iterations: int = 20
    max_workers: int = 2
    enable_performance_logging: bool = False


def get_settings() -> Settings:
    """Get settings based on environment"""
    env = os.getenv("WALLOPT_ENVIRONMENT", "development").lower()

    if env == "production":
        return ProductionConfig()
    elif env == "testing":
        return TestingConfig()
    else:
        return DevelopmentConfig()


# Named run-size presets
PROFILES: Dict[str, Dict[str, int]] = {
    "full": {"runs": 101, "iterations": 1000},
    "ci": {"runs": 11, "iterations": 300},
}

OBJECTIVES = ("cost", "weight", "co2")
ALGORITHMS = ("faglsud", "pso", "de")


class ExperimentConfig(BaseModel):
    """One {example} x {cases} x {objective} x {algorithm} batch"""

    example: int = 1
    cases: List[int] = Field(default_factory=lambda: list(range(1, 10)))
    objective: str = "cost"
    algorithm: str = "faglsud"
    runs: int = Field(default_factory=lambda: settings.default_runs)
    population: int = Field(default_factory=lambda: settings.default_population)
    iterations: int = Field(default_factory=lambda: settings.default_iterations)
    empires: int = Field(default_factory=lambda: settings.default_empires)
    seed: int = Field(default_factory=lambda: settings.root_seed)
    output_directory: str = Field(default_factory=lambda: settings.output_directory)
    parameter_overrides: Dict[str, float] = Field(default_factory=dict)

    @field_validator("example")
    @classmethod
    def check_example(cls, value: int) -> int:
        if value not in (1, 2):
            raise ValueError("example must be 1 or 2")
        return value

    @field_validator("cases")
    @classmethod
    def check_cases(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("at least one seismic case is required")
        bad = [c for c in value if c < 1 or c > 9]
        if bad:
            raise ValueError(f"seismic cases must lie in 1..9, got {bad}")
        return sorted(set(value))

    @field_validator("objective")
    @classmethod
    def check_objective(cls, value: str) -> str:
        value = value.lower()
        if value not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        return value

    @field_validator("algorithm")
    @classmethod
    def check_algorithm(cls, value: str) -> str:
        value = value.lower()
        if value not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        return value

    @field_validator("runs", "iterations")
    @classmethod
    def check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be >= 1")
        return value

    @field_validator("population")
    @classmethod
    def check_population(cls, value: int) -> int:
        if value < 2:
            raise ValueError("population must be >= 2")
        return value

    @model_validator(mode="after")
    def check_empires(self) -> "ExperimentConfig":
        if self.algorithm == "faglsud" and not 1 <= self.empires < self.population:
            raise ValueError("empires must satisfy 1 <= empires < population")
        return self

    @classmethod
    def from_profile(cls, profile: str, **overrides) -> "ExperimentConfig":
        if profile not in PROFILES:
            raise ConfigError(f"Unknown profile '{profile}', expected one of {sorted(PROFILES)}")
        values = dict(PROFILES[profile])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


# Config-file keys accepted as aliases for ExperimentConfig fields
EXPERIMENT_KEYS = {
    "example": "example",
    "case": "cases",
    "cases": "cases",
    "objective": "objective",
    "algo": "algorithm",
    "algorithm": "algorithm",
    "runs": "runs",
    "iters": "iterations",
    "iterations": "iterations",
    "pop": "population",
    "population": "population",
    "empires": "empires",
    "seed": "seed",
    "out": "output_directory",
    "output_directory": "output_directory",
    "profile": "profile",
}


def load_config_file(path: str) -> Tuple[Dict[str, object], Dict[str, float]]:
    """Read a KEY=value config file.

    Returns (experiment overrides, design-parameter overrides). Keys not in
    EXPERIMENT_KEYS are treated as design-parameter symbols and must be numeric.
    """
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")

    raw = dotenv_values(path)
    experiment: Dict[str, object] = {}
    parameters: Dict[str, float] = {}

    for key, value in raw.items():
        if value is None:
            raise ConfigError(f"Config key '{key}' has no value")
        name = key.strip()
        if name.lower() in EXPERIMENT_KEYS:
            field = EXPERIMENT_KEYS[name.lower()]
            if field == "cases":
                try:
                    experiment[field] = [int(v) for v in value.replace(",", " ").split()]
                except ValueError:
                    raise ConfigError(f"Invalid case list '{value}'")
            else:
                experiment[field] = value.strip()
        else:
            try:
                parameters[name] = float(value)
            except ValueError:
                raise ConfigError(f"Design parameter '{name}' must be numeric, got '{value}'")

    return experiment, parameters
