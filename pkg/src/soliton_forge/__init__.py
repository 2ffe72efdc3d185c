"""Curvature formulas, residual checks and classification of gradient
Schouten solitons on products ``(R^n, g / psi^2) x (F^m, g_F)``."""

from .errors import (
    CertificationError,
    ConstraintError,
    DomainError,
    ParameterError,
    PlaneError,
    PositivityError,
    SingularMetricError,
    SolitonError,
    StiffnessError,
)
from .profiles import (
    FamilyASolution,
    FamilyBSolution,
    RadialProfile,
    Signature,
    SolitonParams,
    make_family_A,
    make_family_B,
    make_power_profile,
    make_tabulated_profile,
)

__version__ = "0.1.0"

__all__ = [
    "CertificationError",
    "ConstraintError",
    "DomainError",
    "ParameterError",
    "PlaneError",
    "PositivityError",
    "SingularMetricError",
    "SolitonError",
    "StiffnessError",
    "FamilyASolution",
    "FamilyBSolution",
    "RadialProfile",
    "Signature",
    "SolitonParams",
    "make_family_A",
    "make_family_B",
    "make_power_profile",
    "make_tabulated_profile",
]
