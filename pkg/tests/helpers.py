"""Shared test utilities: random radial profiles and a symbolic curvature oracle."""

import math
from functools import lru_cache

import numpy as np
import sympy as sp

from soliton_forge.profiles import RadialProfile


def random_profile(rng, whole_line=False):
    """``psi = a exp(b r) + c r^2`` (positive) and ``h = d sin(e r) + f r^2 + g r``."""
    a = rng.uniform(0.5, 2.0)
    b = rng.uniform(-0.5, 0.5)
    c = rng.uniform(0.0, 0.5)
    d, e, f, g = rng.uniform(-1, 1, size=4)

    def psi(r):
        r = np.asarray(r, dtype=float)
        return a * np.exp(b * r) + c * r**2

    return RadialProfile(
        psi=psi,
        psi1=lambda r: a * b * np.exp(b * np.asarray(r, dtype=float)) + 2 * c * np.asarray(r, dtype=float),
        psi2=lambda r: a * b * b * np.exp(b * np.asarray(r, dtype=float)) + 2 * c,
        h=lambda r: d * np.sin(e * np.asarray(r, dtype=float)) + f * np.asarray(r, dtype=float) ** 2 + g * np.asarray(r, dtype=float),
        h1=lambda r: d * e * np.cos(e * np.asarray(r, dtype=float)) + 2 * f * np.asarray(r, dtype=float) + g,
        h2=lambda r: -d * e * e * np.sin(e * np.asarray(r, dtype=float)) + 2 * f,
        domain=(-math.inf, math.inf) if whole_line else (0.0, math.inf),
        label=f"random a={a:.3f} b={b:.3f} c={c:.3f}",
    )


R = sp.Symbol("r")


def profile_from_sympy(psi_expr, h_expr, domain=(0.0, math.inf)):
    """RadialProfile whose derivatives come from sympy differentiation."""
    fs = [sp.lambdify(R, e, "numpy") for e in (
        psi_expr, sp.diff(psi_expr, R), sp.diff(psi_expr, R, 2),
        h_expr, sp.diff(h_expr, R), sp.diff(h_expr, R, 2))]

    def wrap(f):
        return lambda r: np.broadcast_to(np.asarray(f(np.asarray(r, dtype=float)), dtype=float),
                                         np.shape(r)).copy()

    return RadialProfile(*[wrap(f) for f in fs], domain=domain, label=f"sympy psi={psi_expr}")


@lru_cache(maxsize=None)
def symbolic_geometry(psi_src, h_src, eps):
    """Ricci, Hessian of h and scalar curvature of ``g = diag(eps) / psi^2`` computed symbolically.

    ``psi_src`` and ``h_src`` are strings in ``r``; the metric is built in
    Cartesian coordinates with ``r = sum eps_i x_i^2`` substituted, so the
    radial reduction is not used anywhere.
    """
    n = len(eps)
    xs = sp.symbols(f"x0:{n}")
    r_of_x = sum(e * x**2 for e, x in zip(eps, xs))
    psi = sp.sympify(psi_src).subs(R, r_of_x)
    h = sp.sympify(h_src).subs(R, r_of_x)
    g = sp.diag(*[sp.Integer(e) / psi**2 for e in eps])
    ginv = sp.diag(*[sp.Integer(e) * psi**2 for e in eps])
    dg = [[[sp.diff(g[i, j], xs[k]) for k in range(n)] for j in range(n)] for i in range(n)]
    gamma = [[[sum(ginv[k, l] * (dg[j][l][i] + dg[i][l][j] - dg[i][j][l]) for l in range(n)) / 2
               for j in range(n)] for i in range(n)] for k in range(n)]
    ric = sp.zeros(n, n)
    for i in range(n):
        for j in range(i, n):
            val = 0
            for k in range(n):
                val += sp.diff(gamma[k][i][j], xs[k]) - sp.diff(gamma[k][k][j], xs[i])
                for l in range(n):
                    val += gamma[k][k][l] * gamma[l][i][j] - gamma[k][i][l] * gamma[l][k][j]
            ric[i, j] = ric[j, i] = val
    hess = sp.zeros(n, n)
    for i in range(n):
        for j in range(i, n):
            val = sp.diff(h, xs[i], xs[j]) - sum(gamma[k][i][j] * sp.diff(h, xs[k]) for k in range(n))
            hess[i, j] = hess[j, i] = val
    scalar = sum(ginv[i, i] * ric[i, i] for i in range(n))
    return (sp.lambdify([xs], ric, "numpy"), sp.lambdify([xs], hess, "numpy"),
            sp.lambdify([xs], scalar, "numpy"), sp.lambdify([xs], psi, "numpy"))


def symbolic_pde(psi_src, h_src, eps, params, x):
    """PDE residuals at ``x`` from the symbolic soliton equation, in the library's layout.

    With ``E = Ric + Hess h - (rho K_total + lambdaTilde) g`` the layout is
    ``psi E_ij`` (i < j), then ``psi^2 E_ii``, then the fiber equation
    ``lambda_F - rho K_total - lambdaTilde``.
    """
    ric_f, hess_f, scal_f, psi_f = symbolic_geometry(psi_src, h_src, tuple(eps))
    rho, lam_f, lam_t = params.floats()
    n = len(eps)
    x = [float(v) for v in x]
    ric = np.array(ric_f(x), dtype=float)
    hess = np.array(hess_f(x), dtype=float)
    psi = float(psi_f(x))
    k_total = float(scal_f(x)) + lam_f * params.m
    g = np.diag(np.asarray(eps, dtype=float)) / psi**2
    E = ric + hess - (rho * k_total + lam_t) * g
    iu, ju = np.triu_indices(n, k=1)
    return np.concatenate([psi * E[iu, ju], psi**2 * np.diag(E), [lam_f - rho * k_total - lam_t]])
