"""Gradient oracles and their structural constants."""

from .checks import StructuralReport, Violation, b2_alt_check, check_structural_constants
from .operations import MeanFieldEstimate, eval_H, eval_h
from .oracles import (
    CallableOracle,
    GradientOracle,
    IIDOracle,
    IIDRhoOracle,
    OracleConstants,
    OracleFamily,
    QuadraticOracle,
)

__all__ = [
    "GradientOracle",
    "QuadraticOracle",
    "IIDOracle",
    "IIDRhoOracle",
    "CallableOracle",
    "OracleConstants",
    "OracleFamily",
    "MeanFieldEstimate",
    "eval_H",
    "eval_h",
    "check_structural_constants",
    "b2_alt_check",
    "StructuralReport",
    "Violation",
]
