"""Robust multivariable control toolkit."""

from ._core import (
    NumericalError,
    SingularMinor,
    ValidationError,
    cascade_coefficients,
    compose_K,
    diagnose,
    ldu_pivots,
    leading_minors,
    minimal_C,
    run_scenario,
    sdu_decompose,
    sign_matrix,
    two_link_accel,
    two_link_inertia,
)

__all__ = [
    "NumericalError",
    "SingularMinor",
    "ValidationError",
    "cascade_coefficients",
    "compose_K",
    "diagnose",
    "ldu_pivots",
    "leading_minors",
    "minimal_C",
    "run_scenario",
    "sdu_decompose",
    "sign_matrix",
    "two_link_accel",
    "two_link_inertia",
]
