"""Closed-form curvature of ``g~ = g / psi^2 + g_F`` for radial ``psi`` and ``h``.

All outputs are coordinate components in the pseudo-Euclidean chart
``(x_1, ..., x_n)`` of the base.  Every function accepts a single point of
shape ``(n,)`` or a batch of shape ``(..., n)``.

Sign convention: ``R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z`` and
``Ric(Y, Z) = tr(X -> R(X, Y)Z)``, so round spheres have positive Ricci and
scalar curvature.  The numerical oracle uses the same convention and the two
agree component by component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class RadialPartials:
    """Cartesian partial derivatives of psi and h at a batch of base points."""

    eps: np.ndarray
    psi: np.ndarray    # (...)
    dpsi: np.ndarray   # (..., n)
    ddpsi: np.ndarray  # (..., n, n)
    dh: np.ndarray     # (..., n)
    ddh: np.ndarray    # (..., n, n)


def radial_partials(profile, sig, x) -> RadialPartials:
    """Expand radial derivatives into Cartesian ones by the chain rule.

    psi_i = 2 eps_i x_i psi',  psi_ij = 4 eps_i eps_j x_i x_j psi'' + 2 eps_i delta_ij psi',
    and the same for h.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != sig.n:
        raise ParameterError(f"point has {x.shape[-1]} coordinates, signature has {sig.n}")
    eps = sig.array
    r = sig.radius(x)
    psi, p1, p2, _, h1, h2 = profile.evaluate(r)
    ex = eps * x
    outer = 4.0 * ex[..., :, None] * ex[..., None, :]
    diag = 2.0 * np.diag(eps)
    return RadialPartials(
        eps=eps,
        psi=psi,
        dpsi=2.0 * ex * p1[..., None],
        ddpsi=outer * p2[..., None, None] + diag * p1[..., None, None],
        dh=2.0 * ex * h1[..., None],
        ddh=outer * h2[..., None, None] + diag * h1[..., None, None],
    )


def ricci_from_partials(P: RadialPartials, n: int) -> np.ndarray:
    psi = P.psi[..., None, None]
    lap = np.einsum("k,...kk->...", P.eps, P.ddpsi)
    grad2 = np.einsum("k,...k->...", P.eps, P.dpsi**2)
    trace_part = lap / P.psi - (n - 1) * grad2 / P.psi**2
    return (n - 2) * P.ddpsi / psi + np.diag(P.eps) * trace_part[..., None, None]


def hessian_from_partials(P: RadialPartials) -> np.ndarray:
    psi = P.psi[..., None, None]
    cross = P.dpsi[..., :, None] * P.dh[..., None, :]
    mixed = np.einsum("k,...k,...k->...", P.eps, P.dpsi, P.dh) / P.psi
    return P.ddh + (cross + np.swapaxes(cross, -1, -2)) / psi - np.diag(P.eps) * mixed[..., None, None]


def scalar_from_partials(P: RadialPartials, n: int) -> np.ndarray:
    terms = 2 * (n - 1) * P.psi[..., None] * np.diagonal(P.ddpsi, axis1=-2, axis2=-1) \
        - (n - 1) * n * P.dpsi**2
    return np.einsum("k,...k->...", P.eps, terms)


def ricci_closed_form(profile, sig, params, x):
    """Base block of ``Ric_g~`` and the fiber factor ``lambda_F``.

    The mixed base-fiber block vanishes identically and the fiber block is
    ``lambda_F * g_F``; only the scalar is returned for it.
    """
    P = radial_partials(profile, sig, x)
    return ricci_from_partials(P, sig.n), float(params.lambdaF)


def hessian_closed_form(profile, x, sig):
    """Base block of ``Hess_g~ h``; the other blocks vanish because h lives on the base."""
    return hessian_from_partials(radial_partials(profile, sig, x))


def scalar_curvature(profile, sig, params, x):
    """``(K_base, K_fiber, K_total)`` with ``K_fiber = lambda_F * m``."""
    K_base = scalar_from_partials(radial_partials(profile, sig, x), sig.n)
    K_fiber = float(params.lambdaF) * params.m
    return K_base, K_fiber, K_base + K_fiber


def to_orthonormal_frame(matrix, profile, sig, x):
    """Components of a base (0,2)-tensor in the frame ``e_i = psi * d/dx_i``."""
    psi = profile.evaluate(sig.radius(x))[0]
    return np.asarray(matrix) * (psi**2)[..., None, None]


@dataclass(frozen=True)
class CurvatureReport:
    ric_base: np.ndarray
    ric_mixed_zero: bool
    ric_fiber_factor: float
    hess_base: np.ndarray
    K_base: float
    K_fiber: float
    K_total: float

    def to_dict(self):
        return {
            "ric_base": np.asarray(self.ric_base).tolist(),
            "ric_mixed_zero": self.ric_mixed_zero,
            "ric_fiber_factor": self.ric_fiber_factor,
            "hess_base": np.asarray(self.hess_base).tolist(),
            "K_base": self.K_base,
            "K_fiber": self.K_fiber,
            "K_total": self.K_total,
        }


def curvature_report(profile, sig, params, x, frame="coordinate") -> CurvatureReport:
    """Everything the soliton equation needs at one base point."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ParameterError("curvature_report takes a single point")
    P = radial_partials(profile, sig, x)
    ric = ricci_from_partials(P, sig.n)
    hess = hessian_from_partials(P)
    if frame == "orthonormal":
        ric, hess = ric * P.psi**2, hess * P.psi**2
    elif frame != "coordinate":
        raise ParameterError(f"unknown frame {frame!r}")
    K_base = float(scalar_from_partials(P, sig.n))
    K_fiber = float(params.lambdaF) * params.m
    return CurvatureReport(
        ric_base=ric,
        ric_mixed_zero=True,
        ric_fiber_factor=float(params.lambdaF),
        hess_base=hess,
        K_base=K_base,
        K_fiber=K_fiber,
        K_total=K_base + K_fiber,
    )
