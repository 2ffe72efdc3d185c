"""Radial conformal factors psi(r), potentials h(r) and the closed-form families.

A profile carries six callables, psi, psi', psi'', h, h', h'', all coded
analytically so that residual checks downstream never mix formula errors with
differentiation errors.  Constants (lambda_F, lambda~, rho) are kept as
``fractions.Fraction`` whenever the inputs are rational so that the classical
example values come out exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from numbers import Integral, Rational
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import ConstraintError, DomainError, ParameterError, PositivityError


def as_exact(value):
    """Return ``value`` as a Fraction when it is rational, else as a float.

    Strings such as ``"1/2"`` or ``"-3"`` are parsed as fractions, which is
    how JSON configs spell exact constants.
    """
    if isinstance(value, bool):
        raise ParameterError(f"expected a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (Integral, Rational)):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        try:
            return Fraction("".join(value.split()))
        except ValueError as exc:
            raise ParameterError(f"cannot parse number {value!r}") from exc
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise ParameterError(f"expected a number, got {value!r}")


def schouten_rho(n: int) -> Fraction:
    return Fraction(1, 2 * (n - 1))


@dataclass(frozen=True)
class Signature:
    """Diagonal pseudo-Euclidean metric ``g_ij = delta_ij * eps_i``."""

    eps: tuple

    def __post_init__(self):
        eps = tuple(int(e) for e in self.eps)
        if len(eps) < 3:
            raise ParameterError(f"signature needs n >= 3 entries, got {len(eps)}")
        if any(e not in (1, -1) for e in eps):
            raise ParameterError(f"signature entries must be +1 or -1: {eps}")
        if 1 not in eps:
            raise ParameterError("signature needs at least one +1 entry")
        object.__setattr__(self, "eps", eps)

    @classmethod
    def riemannian(cls, n: int) -> "Signature":
        return cls((1,) * n)

    @property
    def n(self) -> int:
        return len(self.eps)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.eps, dtype=float)

    @property
    def is_riemannian(self) -> bool:
        return all(e == 1 for e in self.eps)

    def radius(self, x) -> np.ndarray:
        """Basic invariant ``r = sum_k eps_k x_k**2`` (batched over leading axes)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ParameterError(f"point has {x.shape[-1]} coordinates, expected {self.n}")
        return np.einsum("...k,k->...", x * x, self.array)

    def lift(self, r, direction=None) -> np.ndarray:
        """Points ``x`` with ``radius(x) == r`` along a fixed direction.

        The default direction has every coordinate nonzero so that all the
        off-diagonal equations are exercised.  All ``r`` must share one sign.
        """
        r = np.asarray(r, dtype=float)
        eps = self.array
        sign = 1.0 if np.all(r >= 0) else -1.0
        if sign < 0 and np.any(r > 0):
            raise DomainError("cannot lift radii of both signs along one direction")
        if direction is None:
            major = eps == sign
            n_major, n_minor = int(major.sum()), int((~major).sum())
            if n_major == 0:
                raise DomainError("negative r is unreachable in a Riemannian signature")
            direction = np.ones(self.n)
            if n_minor:
                # keep the minority axes light enough that the direction has the right causal type
                direction[~major] = math.sqrt(n_major / (2.0 * n_minor))
        direction = np.asarray(direction, dtype=float)
        q = float(np.dot(eps, direction**2))
        if q == 0.0 or (np.any(r != 0) and np.sign(q) != sign):
            raise DomainError("lift direction has the wrong causal character for these radii")
        return np.sqrt(r / q)[..., None] * direction


@dataclass(frozen=True)
class SolitonParams:
    n: int
    m: int
    rho: object
    lambdaF: object
    lambdaTilde: object

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 3:
            raise ParameterError(f"base dimension n must be an integer >= 3, got {self.n}")
        if int(self.m) != self.m or self.m < 1:
            raise ParameterError(f"fiber dimension m must be an integer >= 1, got {self.m}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))
        for name in ("rho", "lambdaF", "lambdaTilde"):
            object.__setattr__(self, name, as_exact(getattr(self, name)))
        if self.rho == 0:
            raise ParameterError("rho must be nonzero")

    @classmethod
    def schouten(cls, n, m, lambdaF, lambdaTilde) -> "SolitonParams":
        return cls(n, m, schouten_rho(n), lambdaF, lambdaTilde)

    @property
    def is_schouten(self) -> bool:
        target = schouten_rho(self.n)
        if isinstance(self.rho, Fraction):
            return self.rho == target
        return math.isclose(self.rho, float(target), rel_tol=1e-15, abs_tol=0.0)

    def floats(self):
        """``(rho, lambdaF, lambdaTilde)`` as floats for array arithmetic."""
        return float(self.rho), float(self.lambdaF), float(self.lambdaTilde)

    def with_(self, **changes) -> "SolitonParams":
        return replace(self, **changes)


def _const(value):
    value = float(value)
    return lambda r: np.full(np.shape(r), value)


@dataclass(frozen=True)
class RadialProfile:
    """Conformal factor and potential as functions of ``r`` with exact derivatives."""

    psi: Callable
    psi1: Callable
    psi2: Callable
    h: Callable
    h1: Callable
    h2: Callable
    domain: tuple = (0.0, math.inf)
    closed: bool = False
    label: str = ""
    flags: frozenset = field(default_factory=frozenset)

    def in_domain(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        lo, hi = self.domain
        if self.closed:
            return (r >= lo) & (r <= hi)
        return (r > lo) & (r < hi)

    def check(self, r) -> np.ndarray:
        """Validate ``r`` against the domain and psi > 0; return it as floats."""
        r = np.asarray(r, dtype=float)
        inside = self.in_domain(r)
        if not np.all(inside):
            bad = r[~inside] if r.ndim else r
            raise DomainError(
                f"r={np.ravel(bad)[0]!r} outside profile domain {self.domain} ({self.label})"
            )
        psi = np.asarray(self.psi(r), dtype=float)
        if np.any(~(psi > 0)):
            bad = r[~(psi > 0)] if r.ndim else r
            raise PositivityError(f"psi <= 0 at r={np.ravel(bad)[0]!r} ({self.label})")
        return r

    def evaluate(self, r):
        """Return ``(psi, psi', psi'', h, h', h'')`` at ``r``."""
        r = self.check(r)
        return tuple(
            np.broadcast_to(np.asarray(f(r), dtype=float), r.shape)
            for f in (self.psi, self.psi1, self.psi2, self.h, self.h1, self.h2)
        )

    @property
    def constant_potential(self) -> bool:
        return "constant-potential" in self.flags

    def scaled(self, c) -> "RadialProfile":
        """Same potential, conformal factor multiplied by the constant ``c > 0``."""
        c = float(c)
        if c <= 0:
            raise ParameterError("scaling constant must be positive")
        psi, psi1, psi2 = self.psi, self.psi1, self.psi2
        return replace(
            self,
            psi=lambda r: c * psi(r),
            psi1=lambda r: c * psi1(r),
            psi2=lambda r: c * psi2(r),
            label=f"{c}*({self.label})",
        )

    def with_potential(self, h, h1, h2, flags=None) -> "RadialProfile":
        return replace(self, h=h, h1=h1, h2=h2, flags=frozenset(flags or ()))

    def derivative_check(self, r, step: float = 1e-3) -> float:
        """Largest relative mismatch between coded and finite-difference derivatives.

        Five-point stencils with a step proportional to ``|r|``; the mismatch of
        each derivative is scaled by the natural size of that derivative, so a
        vanishing analytic value (psi'' of a linear factor) is not divided by 0.
        """
        r = self.check(np.atleast_1d(np.asarray(r, dtype=float)))
        lo, hi = self.domain
        dr = step * np.maximum(np.abs(r), 1e-3)
        room = np.minimum(r - lo, hi - r) / 2.5
        dr = np.minimum(dr, room)
        worst = 0.0
        for f, f1, f2 in ((self.psi, self.psi1, self.psi2), (self.h, self.h1, self.h2)):
            vals = [np.asarray(f(r + k * dr), dtype=float) for k in (-2, -1, 0, 1, 2)]
            num1 = (vals[0] - 8 * vals[1] + 8 * vals[3] - vals[4]) / (12 * dr)
            num2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * dr**2)
            a0 = np.abs(vals[2])
            a1 = np.abs(np.asarray(f1(r), dtype=float))
            a2 = np.abs(np.asarray(f2(r), dtype=float))
            ar = np.abs(r)
            scale1 = np.maximum.reduce([a1, a0 / ar, np.full_like(r, 1e-12)])
            scale2 = np.maximum.reduce([a2, a1 / ar, a0 / ar**2, np.full_like(r, 1e-12)])
            worst = max(
                worst,
                float(np.max(np.abs(num1 - f1(r)) / scale1)),
                float(np.max(np.abs(num2 - f2(r)) / scale2)),
            )
        return worst


ZERO_POTENTIAL = (_const(0.0), _const(0.0), _const(0.0))


def log_potential(a, c=0.0):
    """``h = a ln r + c`` with its derivatives."""
    a, c = float(a), float(c)
    return (
        lambda r: a * np.log(r) + c,
        lambda r: a / np.asarray(r, dtype=float),
        lambda r: -a / np.asarray(r, dtype=float) ** 2,
    )


def _check_dims(n, m, k2):
    if int(n) != n or n < 3:
        raise ParameterError(f"n must be an integer >= 3, got {n}")
    if int(m) != m or m < 2:
        raise ParameterError(f"m must be an integer >= 2, got {m}")
    if as_exact(k2) <= 0:
        raise ParameterError(f"k2 must be positive, got {k2}")


@dataclass(frozen=True)
class FamilyASolution:
    """psi = k2 r, h = lambda_F / (2 k2^2 r) + k1."""

    k2: object
    k1: object
    params: SolitonParams
    negative_r: bool = False

    def check_constraints(self):
        p = self.params
        expected = -p.lambdaF * (p.m - 2 * p.n + 2) / (2 * (p.n - 1))
        if not p.is_schouten:
            raise ConstraintError("family A requires the Schouten value of rho")
        if not _equal(p.lambdaTilde, expected):
            raise ConstraintError(
                f"family A needs lambdaTilde = {expected}, got {p.lambdaTilde}"
            )
        return True


@dataclass(frozen=True)
class FamilyBSolution:
    """psi = k2 sqrt(r), h = (n-2)/8 ln(r)^2 + c ln r + c1."""

    k2: object
    c: object
    c1: object
    params: SolitonParams

    def check_constraints(self):
        p = self.params
        k2sq = self.k2 * self.k2
        lam_f = (p.n - 2) * k2sq
        lam_t = -Fraction(p.m - p.n + 1) * (p.n - 2) * k2sq / (2 * (p.n - 1))
        if not p.is_schouten:
            raise ConstraintError("family B requires the Schouten value of rho")
        if not _equal(p.lambdaF, lam_f):
            raise ConstraintError(f"family B forces lambdaF = {lam_f}, got {p.lambdaF}")
        if not _equal(p.lambdaTilde, lam_t):
            raise ConstraintError(f"family B forces lambdaTilde = {lam_t}, got {p.lambdaTilde}")
        return True


def _equal(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=1e-14)


def family_a_lambda_tilde(n, m, lambdaF):
    return -as_exact(lambdaF) * (m - 2 * n + 2) / (2 * (n - 1))


def family_b_constants(n, m, k2):
    """``(lambdaF, lambdaTilde)`` forced on the square-root branch."""
    k2 = as_exact(k2)
    k2sq = k2 * k2
    lam_f = (n - 2) * k2sq
    lam_t = -(m - n + 1) * (n - 2) * k2sq / (2 * (n - 1))
    return lam_f, lam_t


def make_family_A(n, m, lambdaF, k2, k1=0, negative_r=False):
    """Linear conformal factor branch; returns ``(FamilyASolution, RadialProfile)``.

    With ``negative_r`` the profile lives on ``r < 0`` (pseudo-Euclidean bases)
    and uses ``psi = k2 |r|``, which gives the same metric ``g / psi**2``.
    """
    _check_dims(n, m, k2)
    k2, k1, lambdaF = as_exact(k2), as_exact(k1), as_exact(lambdaF)
    params = SolitonParams.schouten(n, m, lambdaF, family_a_lambda_tilde(n, m, lambdaF))
    sol = FamilyASolution(k2, k1, params, negative_r=negative_r)

    k, a, b = float(k2), float(lambdaF) / (2 * float(k2) ** 2), float(k1)
    sign = -1.0 if negative_r else 1.0
    flags = {"constant-potential"} if lambdaF == 0 else set()
    profile = RadialProfile(
        psi=lambda r: sign * k * np.asarray(r, dtype=float),
        psi1=_const(sign * k),
        psi2=_const(0.0),
        h=lambda r: a / np.asarray(r, dtype=float) + b,
        h1=lambda r: -a / np.asarray(r, dtype=float) ** 2,
        h2=lambda r: 2 * a / np.asarray(r, dtype=float) ** 3,
        domain=(-math.inf, 0.0) if negative_r else (0.0, math.inf),
        label=f"family A (k2={k2}, k1={k1}, lambdaF={lambdaF})",
        flags=frozenset(flags),
    )
    return sol, profile


def make_family_B(n, m, k2, c=0, c1=0):
    """Square-root conformal factor branch; returns ``(FamilyBSolution, RadialProfile)``."""
    _check_dims(n, m, k2)
    k2, c, c1 = as_exact(k2), as_exact(c), as_exact(c1)
    lam_f, lam_t = family_b_constants(n, m, k2)
    params = SolitonParams.schouten(n, m, lam_f, lam_t)
    sol = FamilyBSolution(k2, c, c1, params)

    k, q, cf, c1f = float(k2), (n - 2) / 8.0, float(c), float(c1)

    def h(r):
        L = np.log(r)
        return q * L * L + cf * L + c1f

    def h1(r):
        r = np.asarray(r, dtype=float)
        return (2 * q * np.log(r) + cf) / r

    def h2(r):
        r = np.asarray(r, dtype=float)
        return (2 * q * (1 - np.log(r)) - cf) / r**2

    profile = RadialProfile(
        psi=lambda r: k * np.sqrt(r),
        psi1=lambda r: 0.5 * k / np.sqrt(r),
        psi2=lambda r: -0.25 * k / np.asarray(r, dtype=float) ** 1.5,
        h=h,
        h1=h1,
        h2=h2,
        domain=(0.0, math.inf),
        label=f"family B (k2={k2}, c={c}, c1={c1})",
    )
    return sol, profile


def make_power_profile(k, s, hspec="zero"):
    """``psi = k r**s`` on ``r > 0``.

    ``hspec`` is ``"zero"``, a ``(h, h', h'')`` triple of callables, or a
    mapping ``{"log": a}`` / ``{"log": a, "const": c}`` for ``h = a ln r + c``.
    """
    if as_exact(k) <= 0:
        raise ParameterError(f"amplitude k must be positive, got {k}")
    kf, sf = float(k), float(s)
    if hspec == "zero" or hspec is None:
        hs, flags = ZERO_POTENTIAL, {"constant-potential"}
    elif isinstance(hspec, dict) and "log" in hspec:
        hs = log_potential(hspec["log"], hspec.get("const", 0.0))
        flags = {"constant-potential"} if float(hspec["log"]) == 0 else set()
    elif isinstance(hspec, (tuple, list)) and len(hspec) == 3:
        hs, flags = tuple(hspec), set()
    else:
        raise ParameterError(f"unsupported potential specification {hspec!r}")
    return RadialProfile(
        psi=lambda r: kf * np.asarray(r, dtype=float) ** sf,
        psi1=lambda r: kf * sf * np.asarray(r, dtype=float) ** (sf - 1),
        psi2=lambda r: kf * sf * (sf - 1) * np.asarray(r, dtype=float) ** (sf - 2),
        h=hs[0],
        h1=hs[1],
        h2=hs[2],
        domain=(0.0, math.inf),
        label=f"power (k={k}, s={s})",
        flags=frozenset(flags),
    )


def make_tabulated_profile(r, psi, h=None, order=3):
    """Interpolating spline profile through samples ``(r_i, psi_i[, h_i])``."""
    r = np.asarray(r, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if r.ndim != 1 or r.size < order + 1 or r.shape != psi.shape:
        raise ParameterError("tabulated profile needs matching 1-d samples, at least order+1 of them")
    if np.any(np.diff(r) <= 0):
        raise ParameterError("tabulated r samples must be strictly increasing")
    if np.any(psi <= 0):
        raise PositivityError("tabulated psi samples must be positive")
    ps = make_interp_spline(r, psi, k=order)
    dps, ddps = ps.derivative(1), ps.derivative(2)
    if h is None:
        hs, flags = ZERO_POTENTIAL, {"constant-potential"}
    else:
        hspl = make_interp_spline(r, np.asarray(h, dtype=float), k=order)
        hs, flags = (hspl, hspl.derivative(1), hspl.derivative(2)), set()
    return RadialProfile(
        psi=ps, psi1=dps, psi2=ddps, h=hs[0], h1=hs[1], h2=hs[2],
        domain=(float(r[0]), float(r[-1])), closed=True,
        label=f"tabulated ({r.size} samples, order {order})",
        flags=frozenset(flags),
    )
