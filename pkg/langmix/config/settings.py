"""
Runtime settings for langmix.

Loaded from LANGMIX_* environment variables (and an optional .env file). Settings only
affect how work is scheduled and reported, never the numbers a run produces.
"""

import os
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return max(1, min(4, os.cpu_count() or 1))


class LangmixSettings(BaseSettings):
    """Application settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="LANGMIX_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Execution
    threads: int = Field(
        default_factory=_default_threads,
        description="Upper bound on worker threads used for replica blocks",
    )

    # Reporting
    log_level: str = Field(default="INFO", description="Logging level")
    output_dir: str = Field(default="runs", description="Default directory for run outputs")

    # Statistics
    bootstrap_resamples: int = Field(
        default=1000, description="Resamples for bootstrap standard errors and intervals"
    )
    verify_seed: int = Field(default=20240601, description="Seed used by `langmix verify`")

    @field_validator("threads")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """Clamp the worker cap to at least one thread."""
        return max(1, v)

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Normalise and validate the log level name."""
        level = v.upper()
        if level not in {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}:
            raise ValueError(f"Unknown log level: {v}")
        return level

    @field_validator("bootstrap_resamples")
    @classmethod
    def validate_resamples(cls, v: int) -> int:
        """Bootstrap needs a handful of resamples to be meaningful."""
        if v < 10:
            raise ValueError("bootstrap_resamples must be at least 10")
        return v


# Singleton instance
_settings: Optional[LangmixSettings] = None


def get_settings() -> LangmixSettings:
    """Get runtime settings (singleton pattern)."""
    global _settings
    if _settings is None:
        _settings = LangmixSettings()
    return _settings


def reset_settings() -> None:
    """Drop the cached settings so the next call re-reads the environment."""
    global _settings
    _settings = None
