"""Classification of radial gradient Schouten solitons and its consequences.

Two families exhaust the power-law solutions:

* family A: ``psi = k2 r``, ``h = lambda_F / (2 k2^2 r) + k1``, with lambda_F free;
* family B: ``psi = k2 sqrt(r)``, ``h = (n-2)/8 ln(r)^2 + c ln r + c1``, with
  ``lambda_F = (n-2) k2^2`` forced.

Here the classification is turned into checkable objects: solution
descriptors, residual reports over r-grids, the three classical product
examples, the curvature-level cylinder certificate and the exponent scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import CertificationError, ConstraintError, ParameterError
from .oracle import conformal_base_chart, riemann_numeric, round_sphere, scalar_numeric, sectional_numeric, sphere_product
from .profiles import (
    RadialProfile,
    Signature,
    SolitonParams,
    as_exact,
    family_b_constants,
    make_family_A,
    make_family_B,
    make_power_profile,
)
from .systems import (
    ResidualReport,
    equation_stat,
    lemma_ode_residual,
    ode_residuals,
    pde_residuals,
    schouten_residuals,
)

CLOSED_FORM_TOL = 1e-10


def soliton_type(lambdaTilde) -> str:
    """Shrinking for lambda > 0, steady for 0, expanding for lambda < 0."""
    lam = as_exact(lambdaTilde)
    if lam > 0:
        return "shrinking"
    if lam < 0:
        return "expanding"
    return "steady"


@dataclass(frozen=True)
class SolutionDescriptor:
    family: str
    profile: RadialProfile
    params: SolitonParams
    solution: object = None
    sig: Signature | None = None
    name: str = ""
    flags: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if self.sig is None:
            object.__setattr__(self, "sig", Signature.riemannian(self.params.n))
        object.__setattr__(self, "flags", frozenset(self.flags) | self.profile.flags)

    @property
    def label(self) -> str:
        return soliton_type(self.params.lambdaTilde)

    def with_lambda_tilde(self, value) -> "SolutionDescriptor":
        return replace(self, params=self.params.with_(lambdaTilde=as_exact(value)),
                       name=f"{self.name} (lambdaTilde={value})", solution=None)

    def to_dict(self):
        p = self.params
        out = {
            "family": self.family,
            "name": self.name,
            "n": p.n,
            "m": p.m,
            "rho": str(p.rho),
            "lambdaF": str(p.lambdaF),
            "lambdaTilde": str(p.lambdaTilde),
            "type": self.label,
            "signature": list(self.sig.eps),
            "profile": self.profile.label,
            "flags": sorted(self.flags),
        }
        sol = self.solution
        if sol is not None:
            out["constants"] = {k: str(v) for k, v in vars(sol).items() if k not in ("params",)}
        return out


def family_a_descriptor(n, m, lambdaF, k2=1, k1=0, negative_r=False, sig=None):
    sol, prof = make_family_A(n, m, lambdaF, k2, k1, negative_r=negative_r)
    return SolutionDescriptor("A", prof, sol.params, sol, sig=sig,
                              name=f"family A n={n} m={m} k2={as_exact(k2)} lambdaF={sol.params.lambdaF}")


def family_b_descriptor(n, m, k2=1, c=0, c1=0, lambdaF=None, sig=None):
    """Square-root branch; a supplied ``lambdaF`` must equal ``(n-2) k2^2``."""
    sol, prof = make_family_B(n, m, k2, c, c1)
    if lambdaF is not None and as_exact(lambdaF) != sol.params.lambdaF:
        if not math.isclose(float(lambdaF), float(sol.params.lambdaF), rel_tol=1e-12):
            raise ConstraintError(
                f"family B forces lambdaF = (n-2) k2^2 = {sol.params.lambdaF}, got {lambdaF}"
            )
    return SolutionDescriptor("B", prof, sol.params, sol, sig=sig,
                              name=f"family B n={n} m={m} k2={as_exact(k2)}")


def classify_schouten(n, m, lambdaF=None, k2=1, k1=0, c=0, c1=0, family=None):
    """All radial Schouten solutions for the given data.

    Family A is returned whenever ``lambdaF`` is known.  Family B is returned
    when ``lambdaF`` is unset or equals ``(n-2) k2^2``; asking for
    ``family="B"`` with an inconsistent ``lambdaF`` raises ConstraintError.
    """
    if n < 3 or m < 2:
        raise ParameterError("classification needs n >= 3 and m >= 2")
    if as_exact(k2) <= 0:
        raise ParameterError("k2 must be positive")
    if family not in (None, "A", "B"):
        raise ParameterError(f"unknown family {family!r}")
    out = []
    if family in (None, "A") and lambdaF is not None:
        out.append(family_a_descriptor(n, m, lambdaF, k2, k1))
    if family in (None, "B"):
        lam_b, _ = family_b_constants(n, m, k2)
        if lambdaF is None or as_exact(lambdaF) == lam_b or family == "B":
            out.append(family_b_descriptor(n, m, k2, c, c1, lambdaF=lambdaF))
    if family == "A" and lambdaF is None:
        raise ParameterError("family A needs lambdaF")
    return out


def default_grid(profile, count=1000, lo=0.1, hi=10.0) -> np.ndarray:
    grid = np.geomspace(lo, hi, count)
    return -grid if profile.domain[1] <= 0 else grid


def verify_solution(desc: SolutionDescriptor, grid=None, tol: float = CLOSED_FORM_TOL) -> ResidualReport:
    """Residuals of a descriptor over an r-grid and at lifted base points.

    Schouten descriptors are checked against R18-R20, any other rho against
    R15-R17; the full PDE system is evaluated at one lifted point per radius.
    """
    prof, params, sig = desc.profile, desc.params, desc.sig
    r = default_grid(prof) if grid is None else np.asarray(grid, dtype=float)
    if params.is_schouten:
        ids = ("R18", "R19", "R20")
        triple = schouten_residuals(prof, params, r)
    else:
        ids = ("R15", "R16", "R17")
        triple = ode_residuals(prof, params, r)
    stats = [equation_stat(i, v, r) for i, v in zip(ids, triple)]

    x = sig.lift(r)
    res = pde_residuals(prof, sig, params, x)
    n = params.n
    k_off = n * (n - 1) // 2
    stats.append(equation_stat("PDE-offdiag", res[:, :k_off], x))
    stats.append(equation_stat("PDE-diag", res[:, k_off:k_off + n], x))
    stats.append(equation_stat("PDE-fiber", res[:, -1], x))
    stats.append(equation_stat("LEMMA", lemma_ode_residual(prof, r), r))

    notes = []
    if prof.constant_potential:
        notes.append("constant potential: h' = 0, so the necessary-ODE step does not apply")
    checked = ids + ("PDE-offdiag", "PDE-diag", "PDE-fiber")
    return ResidualReport(
        per_equation=stats,
        grid={"r_min": float(np.min(r)), "r_max": float(np.max(r)), "count": int(r.size),
              "lifted_points": int(x.shape[0])},
        tol=tol,
        checked=checked,
        notes=notes,
    )


# ---------------------------------------------------------------- examples


@dataclass
class ProductExample:
    key: str
    description: str
    descriptor: SolutionDescriptor
    fiber: object
    report: ResidualReport
    expected_lambdaF: object
    expected_lambdaTilde: object

    @property
    def label(self) -> str:
        return self.descriptor.label

    @property
    def constants_exact(self) -> bool:
        p = self.descriptor.params
        return (p.lambdaF == self.expected_lambdaF and p.lambdaTilde == self.expected_lambdaTilde
                and self.fiber.lambdaF == p.lambdaF)

    @property
    def passed(self) -> bool:
        return self.report.passed and self.constants_exact


def product_examples(n_example2: int = 4, grid=None):
    """The expanding, steady and shrinking product examples, each verified."""
    if n_example2 < 3:
        raise ParameterError("example 2 needs n >= 3")
    n2 = n_example2
    specs = [
        ("example-1", "(S^2 x R) x (S^2 x S^2)", 3, 4,
         sphere_product([(2, 1), (2, 1)]), Fraction(1), Fraction(-1, 2)),
        ("example-2", f"(S^{n2 - 1} x R) x S^{n2 - 1}", n2, n2 - 1,
         round_sphere(n2 - 1, 1), Fraction(n2 - 2), Fraction(0)),
        ("example-3", "(S^3 x R) x S^2(sqrt(2)/2)", 4, 2,
         round_sphere(2, R_squared=Fraction(1, 2)), Fraction(2), Fraction(1, 3)),
    ]
    out = []
    for key, text, n, m, fiber, lam_f, lam_t in specs:
        desc = family_b_descriptor(n, m, k2=1, lambdaF=fiber.lambdaF)
        desc = replace(desc, name=f"{key}: {text}")
        out.append(ProductExample(key, text, desc, fiber, verify_solution(desc, grid), lam_f, lam_t))
    return out


# ---------------------------------------------------------------- rigidity


@dataclass
class CylinderCertificate:
    n: int
    k2: object
    spherical: list
    radial: list
    scalar: list
    expected_spherical: float
    expected_scalar: float
    tolerance: float
    seed: int
    lambdaF: object
    worst: dict
    statement: str = (
        "local isometry surrogate: constant sectional curvature k2^2 on planes tangent to the "
        "coordinate spheres, 0 on planes containing the radial direction, scalar (n-1)(n-2) k2^2, "
        "matching R x S^(n-1)(1/k2); global completeness is not checked"
    )

    @property
    def spherical_error(self) -> float:
        return float(np.max(np.abs(np.asarray(self.spherical) - self.expected_spherical)))

    @property
    def radial_error(self) -> float:
        return float(np.max(np.abs(self.radial)))

    @property
    def scalar_error(self) -> float:
        return float(np.max(np.abs(np.asarray(self.scalar) - self.expected_scalar)))

    @property
    def bonnet_myers_hypothesis(self) -> bool:
        return self.lambdaF > 0

    @property
    def passed(self) -> bool:
        return max(self.spherical_error, self.radial_error, self.scalar_error) <= self.tolerance \
            and self.bonnet_myers_hypothesis

    def to_dict(self):
        return {
            "n": self.n,
            "k2": str(self.k2),
            "points": len(self.scalar),
            "planes": len(self.spherical) + len(self.radial),
            "spherical_sectional_expected": self.expected_spherical,
            "spherical_sectional_max_error": self.spherical_error,
            "radial_sectional_max_abs": self.radial_error,
            "scalar_expected": self.expected_scalar,
            "scalar_max_error": self.scalar_error,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "lambdaF": str(self.lambdaF),
            "bonnet_myers_hypothesis_lambdaF_positive": self.bonnet_myers_hypothesis,
            "worst": self.worst,
            "statement": self.statement,
            "pass": self.passed,
        }


def certify_cylinder(n: int, k2=1, tolerance: float = 1e-4, seed: int = 0,
                     n_points: int = 20, planes_per_kind: int = 1, strict: bool = True):
    """Curvature certificate that ``g* = g_0 / (k2^2 r)`` is the cylinder R x S^(n-1).

    Samples ``n_points`` base points and, at each, ``planes_per_kind`` planes
    tangent to the coordinate sphere plus as many containing the radial
    direction.  Raises CertificationError (with the worst offender) on
    mismatch when ``strict``.
    """
    if n < 3:
        raise ParameterError("cylinder certificate needs n >= 3")
    k2 = as_exact(k2)
    sig = Signature.riemannian(n)
    chart = conformal_base_chart(make_power_profile(k2, Fraction(1, 2)), sig)
    rng = np.random.default_rng(seed)

    dirs = rng.normal(size=(n_points, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.exp(rng.uniform(np.log(0.5), np.log(2.0), size=n_points))
    pts = dirs * radii[:, None]
    riem = riemann_numeric(chart, pts)
    scal = scalar_numeric(chart, pts)

    def tangent(k):
        w = rng.normal(size=(n_points, k, n))
        w -= np.einsum("pkn,pn->pk", w, dirs)[..., None] * dirs[:, None, :]
        return w

    spherical, radial = [], []
    for _ in range(planes_per_kind):
        t = tangent(2)
        spherical.append(sectional_numeric(chart, pts, t[:, 0], t[:, 1], riemann=riem))
        radial.append(sectional_numeric(chart, pts, dirs, tangent(1)[:, 0], riemann=riem))
    spherical = np.concatenate(spherical)
    radial = np.concatenate(radial)

    k2sq = float(k2) ** 2
    exp_sph, exp_scal = k2sq, (n - 1) * (n - 2) * k2sq
    errs = {
        "spherical": np.abs(spherical - exp_sph),
        "radial": np.abs(radial),
        "scalar": np.abs(scal - exp_scal),
    }
    kind = max(errs, key=lambda k: float(np.max(errs[k])))
    idx = int(np.argmax(errs[kind]))
    worst = {"kind": kind, "error": float(errs[kind][idx]),
             "point": pts[idx % n_points].tolist()}
    cert = CylinderCertificate(
        n=n, k2=k2,
        spherical=spherical.tolist(), radial=radial.tolist(), scalar=np.asarray(scal).tolist(),
        expected_spherical=exp_sph, expected_scalar=exp_scal,
        tolerance=tolerance, seed=seed,
        lambdaF=(n - 2) * k2 * k2, worst=worst,
    )
    if strict and not cert.passed:
        raise CertificationError(
            f"cylinder certificate failed for n={n}, k2={k2}: worst {kind} error {worst['error']:.3e}",
            worst=worst,
        )
    return cert


# ---------------------------------------------------------------- exponent scan


def power_descriptor(n, m, k2, s):
    """Best-effort Schouten candidate with ``psi = k2 r^s``.

    For ``s != 1/2`` the potential ``h = a ln r`` with
    ``a = -(n-2) s (s-1) / (2s-1)`` makes R18 vanish identically and the
    R19 left side vanish identically; the constants are then chosen so R19
    holds and R20 holds at ``r = 1``.  What remains is
    ``R20 = s(s-1)(n-2) k2^2 (r^(2s-1) - 1)``, nonzero unless ``s`` is 0 or 1.
    """
    s = as_exact(s)
    if s == Fraction(1, 2):
        return family_b_descriptor(n, m, k2)
    k2 = as_exact(k2)
    coeff = s * (s - 1) * (n - 2) * k2 * k2
    lam_f = -2 * coeff
    lam_t = -lam_f * m / (2 * (n - 1))
    a = -(n - 2) * s * (s - 1) / (2 * s - 1)
    prof = make_power_profile(k2, s, {"log": float(a)})
    params = SolitonParams.schouten(n, m, lam_f, lam_t)
    return SolutionDescriptor("power", prof, params, name=f"power s={s} n={n} m={m} k2={k2}")


@dataclass
class ScanRecord:
    s: object
    passed: bool
    max_abs: float
    max_R20: float
    law_coefficient: float | None
    expected_coefficient: float | None
    law_residual: float | None

    def to_dict(self):
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.__dict__.items()}


def exponent_scan(s_values, n=3, m=2, k2=1, grid=None, tol=CLOSED_FORM_TOL):
    """Verify power-law candidates and fit the failure to ``r^(2s-1) - 1``."""
    out = []
    for s in s_values:
        s = as_exact(s)
        desc = power_descriptor(n, m, k2, s)
        r = default_grid(desc.profile) if grid is None else np.asarray(grid, dtype=float)
        rep = verify_solution(desc, r, tol)
        _, _, R20 = schouten_residuals(desc.profile, desc.params, r)
        max_r20 = float(np.max(np.abs(R20)))
        if s == Fraction(1, 2):
            # no power-law failure to fit on the square-root branch
            out.append(ScanRecord(s, rep.passed, rep.max_residual, max_r20, None, None, None))
            continue
        basis = r ** (2 * float(s) - 1) - 1.0
        fit = float(np.dot(R20, basis) / np.dot(basis, basis))
        law_res = float(np.max(np.abs(R20 - fit * basis)) / max(max_r20, 1e-300))
        expected = float(s * (s - 1) * (n - 2)) * float(k2) ** 2
        out.append(ScanRecord(s, rep.passed, rep.max_residual, max_r20, fit, expected, law_res))
    return out
