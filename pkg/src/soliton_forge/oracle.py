"""Brute-force curvature of an arbitrary coordinate chart by finite differences.

Nothing here knows about conformal factors or solitons: a chart is just a
function returning the metric matrix.  Derivatives of the metric use 4th-order
central stencils; second derivatives are obtained by differencing the
Christoffel symbols again with the same stencil.

Index conventions: ``gamma[..., k, i, j] = Gamma^k_ij`` and
``riemann[..., a, b, c, d] = R^a_bcd`` with ``R(d_c, d_d) d_b = R^a_bcd d_a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    CertificationError,
    ConstraintError,
    DomainError,
    ParameterError,
    PlaneError,
    SingularMetricError,
)
from .profiles import as_exact

DEFAULT_STEP = 1e-3

_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


@dataclass(frozen=True)
class MetricChart:
    """Coordinate chart: ``g(p)`` maps points ``(..., d)`` to matrices ``(..., d, d)``."""

    dim: int
    g: Callable
    domain_check: Callable | None = None
    name: str = ""
    riemannian: bool = True

    def admitted(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if self.domain_check is None:
            return np.ones(p.shape[:-1], dtype=bool)
        return np.asarray(self.domain_check(p), dtype=bool)

    def metric(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape[-1] != self.dim:
            raise ParameterError(f"point has {p.shape[-1]} coordinates, chart has dim {self.dim}")
        if not np.all(self.admitted(p)):
            raise DomainError(f"point outside the admitted region of chart {self.name!r}")
        return np.asarray(self.g(p), dtype=float)


def _stencil_derivative(f, p, step):
    """``out[..., l, *rest] = d f / d p_l`` by the 4th-order central stencil."""
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    shifts = step * _OFFSETS[None, :, None] * np.eye(d)[:, None, :]   # (d, 4, d)
    vals = np.asarray(f(p[..., None, None, :] + shifts))              # (..., d, 4, *rest)
    lead = p.ndim - 1
    w = _WEIGHTS.reshape((4,) + (1,) * (vals.ndim - lead - 2))
    return np.sum(vals * w, axis=lead + 1) / step


def _inverse(g):
    det = np.linalg.det(g)
    if np.any(np.abs(det) <= 1e-12):
        raise SingularMetricError("metric is singular (|det g| <= 1e-12)")
    return np.linalg.inv(g)


def christoffel(chart: MetricChart, p, step: float = DEFAULT_STEP) -> np.ndarray:
    """Levi-Civita symbols ``Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)``."""
    p = np.asarray(p, dtype=float)
    g = chart.metric(p)
    ginv = _inverse(g)
    dg = _stencil_derivative(chart.metric, p, step)   # dg[..., l, i, j] = d_l g_ij
    # lower[..., i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    lower = dg + np.einsum("...jil->...ijl", dg) - np.einsum("...lij->...ijl", dg)
    return 0.5 * np.einsum("...kl,...ijl->...kij", ginv, lower)


def riemann_numeric(chart: MetricChart, p, step: float = DEFAULT_STEP) -> np.ndarray:
    """``R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb``."""
    p = np.asarray(p, dtype=float)
    G = christoffel(chart, p, step)
    dG = _stencil_derivative(lambda q: christoffel(chart, q, step), p, step)  # [..., l, k, i, j]
    return (
        np.einsum("...cadb->...abcd", dG)
        - np.einsum("...dacb->...abcd", dG)
        + np.einsum("...ace,...edb->...abcd", G, G)
        - np.einsum("...ade,...ecb->...abcd", G, G)
    )


def ricci_numeric(chart: MetricChart, p, step: float = DEFAULT_STEP) -> np.ndarray:
    """``R_ij = d_k G^k_ij - d_i G^k_kj + G^k_kl G^l_ij - G^k_il G^l_kj``."""
    p = np.asarray(p, dtype=float)
    G = christoffel(chart, p, step)
    dG = _stencil_derivative(lambda q: christoffel(chart, q, step), p, step)
    return (
        np.einsum("...kkij->...ij", dG)
        - np.einsum("...ikkj->...ij", dG)
        + np.einsum("...kkl,...lij->...ij", G, G)
        - np.einsum("...kil,...lkj->...ij", G, G)
    )


def scalar_numeric(chart: MetricChart, p, step: float = DEFAULT_STEP, ricci=None) -> np.ndarray:
    """Trace of the Ricci tensor with the inverse metric."""
    p = np.asarray(p, dtype=float)
    if ricci is None:
        ricci = ricci_numeric(chart, p, step)
    return np.einsum("...ij,...ij->...", _inverse(chart.metric(p)), ricci)


def sectional_numeric(chart: MetricChart, p, u, v, step: float = DEFAULT_STEP, riemann=None):
    """``K(u, v) = <R(u, v)v, u> / (g(u,u) g(v,v) - g(u,v)^2)``.

    ``u`` and ``v`` broadcast against the batch of points; a precomputed
    Riemann tensor can be passed to evaluate many planes at one point.
    """
    p = np.asarray(p, dtype=float)
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    g = chart.metric(p)
    if riemann is None:
        riemann = riemann_numeric(chart, p, step)
    guu = np.einsum("...ij,...i,...j->...", g, u, u)
    gvv = np.einsum("...ij,...i,...j->...", g, v, v)
    guv = np.einsum("...ij,...i,...j->...", g, u, v)
    area = guu * gvv - guv**2
    if np.any(np.abs(area) <= 1e-10):
        raise PlaneError("degenerate tangent plane (|g(u,u)g(v,v) - g(u,v)^2| <= 1e-10)")
    num = np.einsum("...ea,...abcd,...b,...c,...d,...e->...", g, riemann, v, u, v, u)
    return num / area


def hessian_numeric(chart: MetricChart, f, p, step: float = DEFAULT_STEP) -> np.ndarray:
    """Covariant Hessian ``d_i d_j f - Gamma^k_ij d_k f`` of a scalar function."""
    p = np.asarray(p, dtype=float)
    grad = lambda q: _stencil_derivative(f, q, step)
    df = grad(p)
    ddf = _stencil_derivative(grad, p, step)
    ddf = 0.5 * (ddf + np.swapaxes(ddf, -1, -2))
    return ddf - np.einsum("...kij,...k->...ij", christoffel(chart, p, step), df)


# ---------------------------------------------------------------- charts


def flat_chart(dim: int, eps=None) -> MetricChart:
    eta = np.diag(np.ones(dim) if eps is None else np.asarray(eps, dtype=float))
    return MetricChart(
        dim=dim,
        g=lambda p: np.broadcast_to(eta, np.shape(p)[:-1] + (dim, dim)).copy(),
        name=f"flat R^{dim}",
        riemannian=eps is None or bool(np.all(np.asarray(eps) > 0)),
    )


def flat_spherical_chart() -> MetricChart:
    """Euclidean 3-space in spherical coordinates ``(rho, theta, phi)``.

    Flat but with nonzero Christoffel symbols, so discretisation error is visible.
    """

    def g(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape[:-1] + (3, 3))
        out[..., 0, 0] = 1.0
        out[..., 1, 1] = p[..., 0] ** 2
        out[..., 2, 2] = (p[..., 0] * np.sin(p[..., 1])) ** 2
        return out

    return MetricChart(
        dim=3,
        g=g,
        domain_check=lambda p: (p[..., 0] > 0) & (np.sin(p[..., 1]) > 1e-3),
        name="flat R^3 (spherical coordinates)",
    )


def sphere_chart(m: int, R: float = 1.0) -> MetricChart:
    """Stereographic chart ``g = 4 R^4 / (R^2 + |u|^2)^2 * I`` of the round m-sphere."""
    R = float(R)
    if m < 1 or R <= 0:
        raise ParameterError("sphere chart needs m >= 1 and R > 0")
    eye = np.eye(m)

    def g(u):
        u = np.asarray(u, dtype=float)
        factor = 4 * R**4 / (R**2 + np.sum(u * u, axis=-1)) ** 2
        return factor[..., None, None] * eye

    return MetricChart(
        dim=m,
        g=g,
        domain_check=lambda u: np.sum(np.asarray(u) ** 2, axis=-1) < (3 * R) ** 2,
        name=f"S^{m}(R={R})",
    )


def conformal_base_chart(profile, sig) -> MetricChart:
    """``g*_ij = delta_ij eps_i / psi(r)^2`` on the base."""
    eps = sig.array
    n = sig.n

    def g(x):
        r = sig.radius(x)
        psi = np.asarray(profile.psi(r), dtype=float)
        return np.diag(eps) / (psi**2)[..., None, None]

    def check(x):
        r = sig.radius(x)
        ok = profile.in_domain(r)
        psi = np.where(ok, np.asarray(profile.psi(np.where(ok, r, 1.0)), dtype=float), 0.0)
        return ok & (psi > 0)

    return MetricChart(
        dim=n, g=g, domain_check=check,
        name=f"base g/psi^2 [{profile.label}]", riemannian=sig.is_riemannian,
    )


def _block_chart(a: MetricChart, b: MetricChart, name: str) -> MetricChart:
    da, db = a.dim, b.dim

    def g(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape[:-1] + (da + db, da + db))
        out[..., :da, :da] = a.g(p[..., :da])
        out[..., da:, da:] = b.g(p[..., da:])
        return out

    def check(p):
        p = np.asarray(p, dtype=float)
        return a.admitted(p[..., :da]) & b.admitted(p[..., da:])

    return MetricChart(dim=da + db, g=g, domain_check=check, name=name,
                       riemannian=a.riemannian and b.riemannian)


@dataclass(frozen=True)
class FiberChart:
    """Einstein fiber ``(F^m, g_F)`` with its Einstein constant."""

    kind: str
    chart: MetricChart
    lambdaF: object
    factors: tuple = field(default_factory=tuple)

    @property
    def m(self) -> int:
        return self.chart.dim

    @property
    def sample_radius(self) -> float:
        """Radius of a ball in each factor's coordinates that is safely admitted."""
        radii = [R for (kind, _m, R) in self.factors if kind == "round_sphere"]
        return min(radii) if radii else 1.0


def round_sphere(m: int, R=1, R_squared=None) -> FiberChart:
    """Round m-sphere of radius R; ``lambda_F = (m - 1) / R^2``.

    ``R_squared`` lets an irrational radius such as sqrt(2)/2 keep an exact
    Einstein constant.
    """
    R2 = as_exact(R_squared) if R_squared is not None else as_exact(R) ** 2
    if R2 <= 0:
        raise ParameterError("sphere radius must be positive")
    lam = (m - 1) / R2 if m > 1 else 0
    R = float(R2) ** 0.5
    return FiberChart("round_sphere", sphere_chart(m, R), lam, (("round_sphere", m, R),))


def flat_fiber(m: int) -> FiberChart:
    return FiberChart("flat", flat_chart(m), 0, (("flat", m, 1.0),))


def einstein_constant(chart: MetricChart, points, step: float = DEFAULT_STEP):
    """Least-squares ``lambda`` in ``Ric = lambda g`` and the worst residual."""
    ric = ricci_numeric(chart, points, step)
    g = chart.metric(points)
    lam = float(np.sum(ric * g) / np.sum(g * g))
    return lam, float(np.max(np.abs(ric - lam * g)))


def sphere_product(factors, seed: int = 0, tol: float = 1e-6) -> FiberChart:
    """Product of round spheres ``[(m_1, R_1), (m_2, R_2), ...]``.

    The product is Einstein only if every factor has the same constant
    ``(m_i - 1) / R_i^2``; the constant is then certified numerically on the
    assembled chart rather than taken on faith.
    """
    if len(factors) < 1:
        raise ParameterError("sphere_product needs at least one factor")
    fibers = [round_sphere(m, R) for m, R in factors]
    lams = {f.lambdaF for f in fibers}
    if len(lams) != 1:
        raise ConstraintError(f"factors have different Einstein constants {sorted(map(float, lams))}")
    chart = fibers[0].chart
    for f in fibers[1:]:
        chart = _block_chart(chart, f.chart, f"{chart.name} x {f.chart.name}")
    nominal = lams.pop()
    rng = np.random.default_rng(seed)
    pts = np.concatenate(
        [rng.uniform(-0.5, 0.5, size=(20, m)) * float(R) for m, R in factors], axis=-1
    )
    lam, worst = einstein_constant(chart, pts)
    if abs(lam - float(nominal)) > tol or worst > tol:
        raise CertificationError(
            f"product fiber is not Einstein with lambda={float(nominal)}: got {lam}, residual {worst}"
        )
    all_factors = tuple(t for f in fibers for t in f.factors)
    return FiberChart("sphere_product", chart, nominal, all_factors)


def product_chart(base, fiber) -> MetricChart:
    """Block-diagonal chart of ``base x fiber``.

    ``base`` is either a ``(profile, signature)`` pair or a ready MetricChart;
    ``fiber`` is a FiberChart or MetricChart.
    """
    if isinstance(base, tuple):
        profile, sig = base
        base = conformal_base_chart(profile, sig)
    fchart = fiber.chart if isinstance(fiber, FiberChart) else fiber
    return _block_chart(base, fchart, f"{base.name} x {fchart.name}")
