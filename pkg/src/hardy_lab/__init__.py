"""Hardy-type nonlocality for two spin-1/2 particles with in-plane measurements."""

from .hardy import (
    GOLDEN,
    GOLDEN_ANGLE,
    P_MAX,
    DegenerateSetup,
    HardyReport,
    HardyVariant,
    MeasurementSetup,
    TwoQubitState,
    check_conditions,
    construct_state,
    diagonal_coefficients,
    probability_closed_form,
    probability_diagonal,
    solve_unique,
)
from .schmidt import classify, decompose, reduced_density

__all__ = [
    "GOLDEN", "GOLDEN_ANGLE", "P_MAX",
    "DegenerateSetup", "HardyReport", "HardyVariant", "MeasurementSetup", "TwoQubitState",
    "check_conditions", "construct_state", "diagonal_coefficients",
    "probability_closed_form", "probability_diagonal", "solve_unique",
    "classify", "decompose", "reduced_density",
]
