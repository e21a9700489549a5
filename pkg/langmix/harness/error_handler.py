"""
Exception to exit-code mapping for the CLI.

Harness layer is responsible for this module.
"""

import sys
from typing import Optional, TextIO

from loguru import logger
from pydantic import ValidationError

from langmix.errors import ConfigError, LangmixError
from langmix.harness.schemas import ErrorResponse

UNEXPECTED_EXIT_CODE = 1


def error_response(exc: BaseException) -> ErrorResponse:
    """Build the error payload for ``exc``."""
    if isinstance(exc, LangmixError):
        return ErrorResponse(
            error=type(exc).__name__,
            message=exc.message,
            detail=exc.detail,
            exit_code=exc.exit_code,
        )
    if isinstance(exc, ValidationError):
        return ErrorResponse(
            error="ValidationError",
            message="Invalid configuration",
            detail=exc.errors(include_url=False, include_context=False),
            exit_code=ConfigError.exit_code,
        )
    return ErrorResponse(
        error="InternalError",
        message=str(exc) or type(exc).__name__,
        exit_code=UNEXPECTED_EXIT_CODE,
    )


def handle_exception(exc: BaseException, stream: Optional[TextIO] = None) -> int:
    """Log ``exc``, print its JSON payload to ``stream`` (stderr) and return the exit code."""
    response = error_response(exc)
    if response.exit_code == UNEXPECTED_EXIT_CODE:
        logger.opt(exception=exc).error(f"Unhandled exception: {exc}")
    else:
        logger.warning(f"{response.error}: {response.message}")
    (stream or sys.stderr).write(response.model_dump_json() + "\n")
    return response.exit_code
