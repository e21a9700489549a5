"""
langmix: Langevin sampling with dependent data streams.

ULA and SGLD recursions, conditionally L-mixing linear-process streams, every explicit
constant of the convergence analysis, and Monte Carlo checks of the resulting bounds.
"""

from loguru import logger

__version__ = "0.1.0"

# Library code stays silent until an application (the CLI) enables the namespace.
logger.disable("langmix")

__all__ = ["__version__"]
