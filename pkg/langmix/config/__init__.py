"""Configuration module for langmix."""

from .logging import configure_logging
from .settings import LangmixSettings, get_settings, reset_settings

__all__ = ["LangmixSettings", "get_settings", "reset_settings", "configure_logging"]
