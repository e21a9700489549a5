"""
Logging setup for the langmix CLI.
"""

import sys
from typing import Optional

from loguru import logger

from langmix.config.settings import get_settings

LOG_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} [{level:>8}] {name}: {message}"


def configure_logging(level: Optional[str] = None) -> None:
    """Install a single stderr sink and enable the langmix namespace.

    Args:
        level: Log level name; defaults to the LANGMIX_LOG_LEVEL setting.
    """
    logger.remove()
    logger.add(sys.stderr, level=(level or get_settings().log_level).upper(), format=LOG_FORMAT)
    logger.enable("langmix")
