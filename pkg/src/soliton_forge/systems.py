"""Residuals of the soliton equation systems.

Naming follows the display numbers of the source derivation and is frozen:
R15-R17 are the radial reduction for general rho, R18-R20 the Schouten
specialization, R21 the r-derivative of the R19 left-hand side, and LEMMA the
necessary ODE ``r psi psi'' = r psi'^2 - psi psi'``.  Every residual is
"left-hand side minus right-hand side", so an exact solution gives zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .curvature import radial_partials
from .errors import ParameterError
from .profiles import as_exact

# frozen residual ids with the equation each one encodes
EQUATIONS = {
    "PDE-offdiag": "off-diagonal base component of the soliton system, i != j",
    "PDE-diag": "diagonal base component of the soliton system",
    "PDE-fiber": "fiber component of the soliton system",
    "R15": "(n-2) psi'' + psi h'' + 2 psi' h' = 0",
    "R16": "diagonal radial ODE, general rho",
    "R17": "fiber radial ODE, general rho",
    "R18": "(n-2) psi'' + psi h'' + 2 psi' h' = 0 (Schouten rho)",
    "R19": "psi[(n-2)psi' + psi h'] + r[(2-n)psi'^2 - 2 psi psi' h'] = lambda_F m/(4(n-1)) + lambdaTilde/2",
    "R20": "-n psi psi' + 2r[(n/2)psi'^2 - psi psi''] = lambda_F(m-2n+2)/(4(n-1)) + lambdaTilde/2",
    "R21": "r-derivative of R19",
    "LEMMA": "r psi psi'' = r psi'^2 - psi psi'",
}


def pde_residual_labels(n: int):
    labels = [f"PDE-offdiag[{i},{j}]" for i in range(n) for j in range(i + 1, n)]
    labels += [f"PDE-diag[{i}]" for i in range(n)]
    labels.append("PDE-fiber")
    return labels


def pde_residuals_from_partials(P, params) -> np.ndarray:
    """Full PDE system from Cartesian partials; works for non-radial data too.

    Output layout along the last axis: off-diagonal ``(i < j)`` in row-major
    order, then the ``n`` diagonal equations, then the fiber trace equation.
    """
    n, m = params.n, params.m
    rho, lam_f, lam_t = params.floats()
    eps = P.eps
    psi = P.psi
    dpsi, ddpsi, dh, ddh = P.dpsi, P.ddpsi, P.dh, P.ddh

    iu, ju = np.triu_indices(n, k=1)
    off = ((n - 2) * ddpsi + psi[..., None, None] * ddh
           + dpsi[..., :, None] * dh[..., None, :] + dh[..., :, None] * dpsi[..., None, :])
    off = off[..., iu, ju]

    psi_kk = np.diagonal(ddpsi, axis1=-2, axis2=-1)
    h_kk = np.diagonal(ddh, axis1=-2, axis2=-1)
    bracket = (psi[..., None] * psi_kk - (n - 1) * dpsi**2 - psi[..., None] * dpsi * dh
               - 2 * (n - 1) * rho * psi[..., None] * psi_kk + (n - 1) * n * rho * dpsi**2)
    trace_sum = np.einsum("k,...k->...", eps, bracket)
    diag = (eps * trace_sum[..., None]
            + (n - 2) * psi[..., None] * psi_kk + psi[..., None] ** 2 * h_kk
            + 2 * psi[..., None] * dpsi * dh
            - (lam_f * m * rho + lam_t) * eps)

    fiber_terms = (n - 1) * n * rho * dpsi**2 - 2 * (n - 1) * rho * psi[..., None] * psi_kk
    fiber = np.einsum("k,...k->...", eps, fiber_terms) - lam_f * (m * rho - 1) - lam_t
    return np.concatenate([off, diag, fiber[..., None]], axis=-1)


def pde_residuals(profile, sig, params, x) -> np.ndarray:
    """PDE-system residuals at base point(s) ``x`` for a radial profile."""
    if sig.n != params.n:
        raise ParameterError(f"signature has n={sig.n} but params have n={params.n}")
    return pde_residuals_from_partials(radial_partials(profile, sig, x), params)


def ode_residuals(profile, params, r):
    """``(R15, R16, R17)``: the radial reduction for arbitrary nonzero rho."""
    n, m = params.n, params.m
    rho, lam_f, lam_t = params.floats()
    r = np.asarray(r, dtype=float)
    psi, p1, p2, _, h1, h2 = profile.evaluate(r)
    R15 = (n - 2) * p2 + psi * h2 + 2 * p1 * h1
    R16 = (2 * psi * (2 * (n - 1) * (1 - n * rho) * p1 + psi * h1)
           + 4 * r * ((1 - 2 * (n - 1) * rho) * psi * p2 + (n - 1) * (n * rho - 1) * p1**2 - psi * p1 * h1)
           - (lam_f * m * rho + lam_t))
    R17 = (-4 * n * (n - 1) * rho * psi * p1
           + 4 * r * ((n - 1) * n * rho * p1**2 - 2 * (n - 1) * rho * psi * p2)
           - lam_f * (m * rho - 1) - lam_t)
    return R15, R16, R17


def _require_schouten(params):
    if not params.is_schouten:
        raise ParameterError(
            f"Schouten residuals need rho = 1/(2(n-1)) = {Fraction(1, 2 * (params.n - 1))}, got {params.rho}"
        )


def schouten_residuals(profile, params, r):
    """``(R18, R19, R20)`` at ``rho = 1/(2(n-1))``."""
    _require_schouten(params)
    n, m = params.n, params.m
    _, lam_f, lam_t = params.floats()
    r = np.asarray(r, dtype=float)
    psi, p1, p2, _, h1, h2 = profile.evaluate(r)
    R18 = (n - 2) * p2 + psi * h2 + 2 * p1 * h1
    R19 = (psi * ((n - 2) * p1 + psi * h1) + r * ((2 - n) * p1**2 - 2 * psi * p1 * h1)
           - lam_f * m / (4 * (n - 1)) - lam_t / 2)
    R20 = (-n * psi * p1 + 2 * r * (n / 2 * p1**2 - psi * p2)
           - lam_f * (m - 2 * n + 2) / (4 * (n - 1)) - lam_t / 2)
    return R18, R19, R20


def r19_derivative(profile, n, r):
    """R21: ``d/dr`` of the R19 left-hand side (needs only up to h'')."""
    r = np.asarray(r, dtype=float)
    psi, p1, p2, _, h1, h2 = profile.evaluate(r)
    return (p1 * ((n - 2) * p1 + psi * h1)
            + psi * ((n - 2) * p2 + p1 * h1 + psi * h2)
            + ((2 - n) * p1**2 - 2 * psi * p1 * h1)
            + r * (2 * (2 - n) * p1 * p2 - 2 * (p1**2 * h1 + psi * p2 * h1 + psi * p1 * h2)))


def lemma_ode_residual(profile, r):
    """``r psi psi'' - r psi'^2 + psi psi'``; zero exactly on power laws."""
    r = np.asarray(r, dtype=float)
    psi, p1, p2 = profile.evaluate(r)[:3]
    return r * psi * p2 - r * p1**2 + psi * p1


# ---------------------------------------------------------------- exponents


@dataclass(frozen=True)
class ExponentVerdict:
    """Constant solutions of ``s(s-1)(n-2) k2^2 r^(2s-1) = rhs``."""

    rhs: object
    admissible: tuple
    requirements: dict
    degenerate: tuple
    k2_implied: object
    consistent: bool

    def to_dict(self):
        return {
            "rhs": str(self.rhs),
            "admissible": [str(s) for s in self.admissible],
            "requirements": {str(k): v for k, v in self.requirements.items()},
            "degenerate": [str(s) for s in self.degenerate],
            "k2_implied": None if self.k2_implied is None else str(self.k2_implied),
            "consistent": self.consistent,
        }


def exponent_rhs(n, m, lambdaF, lambdaTilde):
    lam_f, lam_t = as_exact(lambdaF), as_exact(lambdaTilde)
    return lam_f * (m - 2 * n + 2) / (4 * (n - 1)) + lam_t / 2


def exponent_constraint(n, m, lambdaF, lambdaTilde, k2=None) -> ExponentVerdict:
    """Which power exponents ``s`` are compatible with the given constants.

    The left side is constant in ``r`` only for ``s`` in {0, 1/2, 1}.  For
    ``s = 0`` or ``1`` the right side must vanish; for ``s = 1/2`` it must
    equal ``-(n-2) k2^2 / 4``, which fixes ``k2`` when it is not supplied.
    ``s = 0`` (constant psi) is reported as degenerate, never dropped.
    """
    if n < 3 or m < 2:
        raise ParameterError("exponent constraint needs n >= 3 and m >= 2")
    rhs = exponent_rhs(n, m, lambdaF, lambdaTilde)
    zero = rhs == 0 if isinstance(rhs, Fraction) else math.isclose(rhs, 0.0, abs_tol=1e-14)
    requirements = {
        Fraction(0): "rhs = 0 (degenerate: constant psi, potential gradient vanishes)",
        Fraction(1): "rhs = 0",
        Fraction(1, 2): "rhs = -(n-2) k2^2 / 4",
    }
    admissible = []
    if zero:
        admissible += [Fraction(0), Fraction(1)]
    k2_implied = None
    if k2 is not None:
        k2 = as_exact(k2)
        target = -Fraction(n - 2) * k2 * k2 / 4 if isinstance(k2, Fraction) else -(n - 2) * k2 * k2 / 4
        hit = rhs == target if isinstance(rhs, Fraction) and isinstance(target, Fraction) \
            else math.isclose(float(rhs), float(target), rel_tol=1e-12, abs_tol=1e-14)
        if hit:
            admissible.append(Fraction(1, 2))
            k2_implied = k2
    elif rhs < 0:
        admissible.append(Fraction(1, 2))
        k2sq = -4 * rhs / (n - 2)
        k2_implied = _exact_sqrt(k2sq)
    admissible = tuple(sorted(admissible))
    degenerate = tuple(s for s in admissible if s == 0)
    return ExponentVerdict(
        rhs=rhs,
        admissible=admissible,
        requirements=requirements,
        degenerate=degenerate,
        k2_implied=k2_implied,
        consistent=bool(admissible),
    )


def _exact_sqrt(q):
    if isinstance(q, Fraction):
        num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if num * num == q.numerator and den * den == q.denominator:
            return Fraction(num, den)
    return math.sqrt(float(q))


# ---------------------------------------------------------------- consistency


@dataclass
class ConsistencyReport:
    offdiag_identity_max: float
    diag_identity_max: float
    fiber_identity_max: float
    ode_max: float
    pde_max: float
    implication_holds: bool
    tol: float

    @property
    def passed(self) -> bool:
        return (max(self.offdiag_identity_max, self.diag_identity_max, self.fiber_identity_max) <= self.tol
                and self.implication_holds)

    def to_dict(self):
        return {**self.__dict__, "passed": self.passed}


def pde_ode_consistency(profile, sig, params, x, tol: float = 1e-12) -> ConsistencyReport:
    """Check the radial reduction pointwise.

    Off-diagonal residual (i, j) must equal ``4 eps_i eps_j x_i x_j R15``, the
    diagonal one ``4 x_i^2 psi R15 + eps_i R16`` and the fiber one ``R17``.
    Tolerances are absolute and scaled by ``max(1, |terms|)``.
    """
    x = np.asarray(x, dtype=float)
    n = sig.n
    eps = sig.array
    res = pde_residuals(profile, sig, params, x)
    r = sig.radius(x)
    R15, R16, R17 = ode_residuals(profile, params, r)
    psi = np.asarray(profile.psi(r), dtype=float)
    iu, ju = np.triu_indices(n, k=1)
    k_off = len(iu)
    ex = eps * x
    off_pred = 4 * ex[..., iu] * ex[..., ju] * R15[..., None]
    diag_pred = 4 * x**2 * (psi * R15)[..., None] + eps * R16[..., None]
    off_err = np.abs(res[..., :k_off] - off_pred) / np.maximum(1.0, np.abs(off_pred))
    diag_err = np.abs(res[..., k_off:k_off + n] - diag_pred) / np.maximum(1.0, np.abs(diag_pred))
    fib_err = np.abs(res[..., -1] - R17) / np.maximum(1.0, np.abs(R17))
    ode_max = float(np.max(np.abs(np.stack([R15, R16, R17]))))
    pde_max = float(np.max(np.abs(res)))
    scale = max(1.0, 1.0 + 4.0 * float(np.max(x**2)) * float(np.max(psi)))
    implication = ode_max > tol or pde_max <= tol * scale
    return ConsistencyReport(
        offdiag_identity_max=float(np.max(off_err, initial=0.0)),
        diag_identity_max=float(np.max(diag_err)),
        fiber_identity_max=float(np.max(fib_err)),
        ode_max=ode_max,
        pde_max=pde_max,
        implication_holds=bool(implication),
        tol=tol,
    )


# ---------------------------------------------------------------- reports


@dataclass
class EquationStat:
    eq_id: str
    max_abs: float
    mean_abs: float
    argmax: object

    def to_dict(self):
        return {"eq_id": self.eq_id, "max_abs": self.max_abs, "mean_abs": self.mean_abs,
                "argmax": self.argmax, "anchor": EQUATIONS.get(self.eq_id.split("[")[0], "")}


@dataclass
class ResidualReport:
    per_equation: list
    grid: dict
    tol: float
    checked: tuple = ()
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        ids = set(self.checked) or {s.eq_id for s in self.per_equation}
        return all(s.max_abs < self.tol for s in self.per_equation if s.eq_id in ids)

    def get(self, eq_id) -> EquationStat:
        for s in self.per_equation:
            if s.eq_id == eq_id:
                return s
        raise KeyError(eq_id)

    @property
    def max_residual(self) -> float:
        ids = set(self.checked) or {s.eq_id for s in self.per_equation}
        return max(s.max_abs for s in self.per_equation if s.eq_id in ids)

    def to_dict(self):
        return {
            "per_equation": [s.to_dict() for s in self.per_equation],
            "grid": self.grid,
            "tol": self.tol,
            "checked": list(self.checked),
            "max_residual": self.max_residual,
            "pass": self.passed,
            "notes": list(self.notes),
        }


def equation_stat(eq_id, values, locations) -> EquationStat:
    """Summary of one residual over a grid; ``locations`` labels each sample."""
    a = np.abs(np.asarray(values, dtype=float))
    flat = a.reshape(len(locations), -1).max(axis=1) if a.ndim > 1 else a
    k = int(np.argmax(flat))
    loc = locations[k]
    loc = loc.tolist() if isinstance(loc, np.ndarray) else float(loc)
    return EquationStat(eq_id, float(flat[k]), float(np.mean(a)), loc)
