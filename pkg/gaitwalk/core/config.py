"""
Configuration for the recognition pipeline, the corpus generator and the CLI.

Settings combine (highest priority first) command-line overrides, a YAML
config file, GAITWALK_* environment variables and the defaults below.
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "GAITWALK_CONFIG"
CONFIG_VERSION = 1


class MfccConfig(BaseModel):
    """Front-end parameters: 25 ms Hamming window every 10 ms, MFCC 0-12."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    frame_length: float = Field(0.025, gt=0)
    frame_shift: float = Field(0.010, gt=0)
    num_cepstra: int = Field(13, ge=1)
    num_mel_filters: int = Field(26, ge=1)
    preemphasis: float = Field(0.97, ge=0.0, lt=1.0)
    delta_window: int = Field(2, ge=1)
    log_floor: float = Field(1e-10, gt=0)
    expected_sample_rate: int = Field(16000, gt=0)
    pca_before_dynamics: bool = False

    @model_validator(mode="after")
    def check_consistency(self) -> "MfccConfig":
        if self.frame_shift > self.frame_length:
            raise ValueError("frame_shift must not exceed frame_length")
        if self.num_cepstra > self.num_mel_filters:
            raise ValueError("num_cepstra must not exceed num_mel_filters")
        return self

    @property
    def window_samples(self) -> int:
        return int(round(self.frame_length * self.expected_sample_rate))

    @property
    def hop_samples(self) -> int:
        return int(round(self.frame_shift * self.expected_sample_rate))

    @property
    def feature_dim(self) -> int:
        return 3 * self.num_cepstra


class HmmConfig(BaseModel):
    """Model topology and training schedule (15 states, 6 iterations)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    num_states: int = Field(15, ge=2)
    training_iterations: int = Field(6, ge=0)
    variance_floor_factor: float = Field(1e-2, gt=0.0, lt=1.0)
    absolute_variance_floor: float = Field(1e-6, gt=0.0)
    min_self_loop: float = Field(1e-3, gt=0.0, lt=0.5)
    cyclic: bool = True


class SynthConfig(BaseModel):
    """Shape of a generated corpus; defaults mirror the N/B/S partition."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    num_subjects: int = Field(10, ge=1)
    takes_n: int = Field(6, ge=1)
    takes_b: int = Field(2, ge=1)
    takes_s: int = Field(2, ge=1)
    enrollment_takes: int = Field(4, ge=1)
    sample_rate: int = Field(16000, gt=0)
    step_period_range: tuple[float, float] = (0.45, 0.65)
    period_jitter: float = Field(0.05, ge=0.0, lt=0.5)
    steps_per_recording: int = Field(5, ge=1)
    snr_db: float = 10.0
    seed: int = Field(42, ge=0, lt=2**64)
    split: Literal["development", "test"] = "development"

    @model_validator(mode="after")
    def check_takes(self) -> "SynthConfig":
        if self.enrollment_takes > self.takes_n:
            raise ValueError("enrollment_takes cannot exceed takes_n")
        low, high = self.step_period_range
        if not 0 < low <= high:
            raise ValueError("step_period_range must be increasing and positive")
        return self

    @property
    def takes_per_condition(self) -> Dict[str, int]:
        return {"N": self.takes_n, "B": self.takes_b, "S": self.takes_s}


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    model_config = SettingsConfigDict(
        env_prefix="GAITWALK_",
        env_nested_delimiter="__",
        extra="forbid",
        case_sensitive=False,
    )

    # Application
    app_name: str = "Gaitwalk"
    app_version: str = "0.1.0"
    config_version: int = CONFIG_VERSION

    # Pipeline
    features: MfccConfig = MfccConfig()
    hmm: HmmConfig = HmmConfig()
    use_pca: bool = True
    grammar: Literal["single", "multi"] = "multi"
    topology: Optional[Literal["linear", "cyclic"]] = None

    # Execution
    jobs: int = Field(1, ge=1)

    # Service
    api_host: str = "0.0.0.0"
    api_port: int = 8000
    model_dir: Optional[Path] = None

    # Logging
    log_level: str = "INFO"
    log_format: Literal["standard", "json"] = "standard"

    @field_validator("config_version")
    @classmethod
    def check_version(cls, v: int) -> int:
        if v != CONFIG_VERSION:
            raise ValueError(f"unsupported config_version {v} (expected {CONFIG_VERSION})")
        return v

    @field_validator("log_level")
    @classmethod
    def check_log_level(cls, v: str) -> str:
        level = v.upper()
        if level not in logging.getLevelNamesMapping():
            raise ValueError(f"unknown log level {v!r}")
        return level

    @model_validator(mode="after")
    def apply_topology(self) -> "Settings":
        """`topology` is a shorthand for hmm.cyclic; resolve it once."""
        if self.topology is not None:
            cyclic = self.topology == "cyclic"
            if cyclic != self.hmm.cyclic:
                self.hmm = self.hmm.model_copy(update={"cyclic": cyclic})
        else:
            self.topology = "cyclic" if self.hmm.cyclic else "linear"
        return self


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def read_config_file(path: Path) -> Dict[str, Any]:
    """Read a YAML config document; an empty file is an empty mapping."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e}", {"path": str(path)}) from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError(f"config file is not valid YAML: {e}", {"path": str(path)}) from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a key-value mapping", {"path": str(path)})
    return data


def load_settings(
    config_path: Optional[Path] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Settings:
    """
    Build Settings from a config file and command-line overrides.

    Args:
        config_path: YAML file; falls back to $GAITWALK_CONFIG when omitted
        overrides: nested mapping of flag values (None values are ignored)

    Returns:
        Validated settings
    """
    if config_path is None and os.environ.get(CONFIG_ENV_VAR):
        config_path = Path(os.environ[CONFIG_ENV_VAR])

    values: Dict[str, Any] = {}
    if config_path is not None:
        logger.debug(f"Loading config file {config_path}")
        values = read_config_file(config_path)

    if overrides:
        values = _deep_merge(values, _drop_none(overrides))

    return Settings(**values)


def _drop_none(mapping: Dict[str, Any]) -> Dict[str, Any]:
    cleaned: Dict[str, Any] = {}
    for key, value in mapping.items():
        if isinstance(value, dict):
            nested = _drop_none(value)
            if nested:
                cleaned[key] = nested
        elif value is not None:
            cleaned[key] = value
    return cleaned


# Global settings instance (service entry point)
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """Get application settings (for dependency injection)."""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings
