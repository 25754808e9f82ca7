"""Generalized Liouville coefficients w_m(n).

Levels are passed as a positive int m or the string "inf" (plain lambda).
"""

from ._wlab import (
    G,
    DomainError,
    InsufficientDataError,
    IoError,
    Lab,
    PrecisionError,
    RangeError,
    SizingError,
    StateError,
    approximate_angle,
    checkpoint_schedule,
    compute_G,
    euler_product,
    exact_theta,
    psi_fraction,
    theta,
    verify_construction,
    witness,
    zeta,
)

__all__ = [
    "G",
    "DomainError",
    "InsufficientDataError",
    "IoError",
    "Lab",
    "PrecisionError",
    "RangeError",
    "SizingError",
    "StateError",
    "approximate_angle",
    "checkpoint_schedule",
    "compute_G",
    "euler_product",
    "exact_theta",
    "psi_fraction",
    "theta",
    "verify_construction",
    "witness",
    "zeta",
]
