"""Exception hierarchy shared by every module."""

import numpy as np


class SolitonError(Exception):
    """Base class for all errors raised by soliton_forge."""


class ParameterError(SolitonError, ValueError):
    """Invalid dimensions, constants or flow parameter."""


class DomainError(SolitonError, ValueError):
    """Evaluation point outside the admitted domain."""


class PositivityError(SolitonError, ValueError):
    """Conformal factor is not strictly positive where it must be."""


class ConstraintError(SolitonError, ValueError):
    """Constants violate a relation forced by the classification."""


class PlaneError(SolitonError, ValueError):
    """Tangent plane is degenerate for the metric."""


class SingularMetricError(SolitonError, np.linalg.LinAlgError):
    """Metric matrix is (numerically) singular."""


class StiffnessError(SolitonError, RuntimeError):
    """Adaptive integrator could not make progress."""


class CertificationError(SolitonError, AssertionError):
    """A curvature certificate failed; carries the worst offender."""

    def __init__(self, message, worst=None):
        super().__init__(message)
        self.worst = worst
