"""Initial-value integration of the necessary ODE and of the potential equation.

The nonlinear form ``psi'' = psi'^2 / psi - psi' / r`` is integrated as
written.  Its exact solutions are the power laws ``k r^s`` (in log variables
it is ``v'' = 0``), which is what the closure checks compare against.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ParameterError, PositivityError, StiffnessError
from .profiles import RadialProfile

POSITIVITY_FLOOR = 1e-12


@dataclass
class Trajectory:
    r: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    s_star: float
    k_star: float
    nfev: int
    dense: object = None

    @property
    def s_local(self) -> np.ndarray:
        """``s(r) = r psi' / psi``; constant along exact solutions."""
        return self.r * self.dpsi / self.psi

    def closure_error(self) -> float:
        """``max |psi - k* r^s*| / psi`` over the samples."""
        model = self.k_star * self.r**self.s_star
        return float(np.max(np.abs(self.psi - model) / self.psi))

    def exponent_drift(self) -> float:
        return float(np.max(np.abs(self.s_local - self.s_star)))

    def to_csv(self, target=None) -> str:
        """Columns ``r, psi, dpsi, s_local``; returns the text and writes it if a path is given."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "psi", "dpsi", "s_local"])
        for row in zip(self.r, self.psi, self.dpsi, self.s_local):
            w.writerow([repr(float(v)) for v in row])
        text = buf.getvalue()
        if target is not None:
            with open(target, "w", encoding="utf-8") as fh:
                fh.write(text)
        return text


def _positivity_event(_r, y):
    return y[0] - POSITIVITY_FLOOR


_positivity_event.terminal = True
_positivity_event.direction = -1


def _solve(rhs, span, y0, t_eval, rtol, atol, events=None):
    sol = solve_ivp(rhs, span, y0, method="RK45", t_eval=t_eval, rtol=rtol, atol=atol,
                    dense_output=True, events=events)
    if sol.status == -1:
        raise StiffnessError(f"integration failed: {sol.message}")
    if sol.status == 1:
        raise PositivityError(f"psi fell below {POSITIVITY_FLOOR} at r={float(sol.t_events[0][0])!r}")
    return sol


def integrate_lemma(r0, psi0, dpsi0, r1, steps=200, rtol=1e-9, atol=1e-12) -> Trajectory:
    """Integrate ``r psi psi'' = r psi'^2 - psi psi'`` from ``r0`` to ``r1``.

    The exponent and amplitude of the power law through the initial data are
    ``s* = r0 psi'(r0) / psi(r0)`` and ``k* = psi(r0) / r0^s*``.
    """
    r0, psi0, dpsi0, r1 = float(r0), float(psi0), float(dpsi0), float(r1)
    if r0 <= 0 or r1 <= 0:
        raise ParameterError("r0 and r1 must be positive")
    if psi0 <= 0:
        raise ParameterError("psi0 must be positive")
    if steps is None or steps < 2:
        steps = 200

    def rhs(r, y):
        psi, dpsi = y
        return [dpsi, dpsi * dpsi / psi - dpsi / r]

    t_eval = np.linspace(r0, r1, int(steps))
    sol = _solve(rhs, (r0, r1), [psi0, dpsi0], t_eval, rtol, atol, events=_positivity_event)
    s_star = r0 * dpsi0 / psi0
    return Trajectory(
        r=sol.t, psi=sol.y[0], dpsi=sol.y[1],
        s_star=s_star, k_star=psi0 / r0**s_star, nfev=int(sol.nfev), dense=sol.sol,
    )


def recover_h(profile_psi: RadialProfile, n: int, c_init, r0, r1, rtol=1e-10, atol=1e-12) -> RadialProfile:
    """Potential solving ``(n-2) psi'' + psi h'' + 2 psi' h' = 0`` for a given psi.

    Written as ``(psi^2 h')' = -(n-2) psi psi''`` and integrated as two
    quadratures for ``w = psi^2 h'`` and ``h``, starting from
    ``c_init = (h(r0), h'(r0))``.  The result keeps ``profile_psi``'s conformal
    factor and lives on the closed interval between ``r0`` and ``r1``.
    """
    r0, r1 = float(r0), float(r1)
    h0, dh0 = (float(c) for c in c_init)
    profile_psi.check(np.array([r0, r1]))
    psi, psi1, psi2 = profile_psi.psi, profile_psi.psi1, profile_psi.psi2

    def rhs(r, y):
        w, _h = y
        p = float(psi(r))
        if p <= POSITIVITY_FLOOR:
            raise PositivityError(f"psi fell below {POSITIVITY_FLOOR} at r={r!r}")
        return [-(n - 2) * p * float(psi2(r)), w / (p * p)]

    w0 = float(psi(r0)) ** 2 * dh0
    sol = _solve(rhs, (r0, r1), [w0, h0], None, rtol, atol)
    dense = sol.sol

    def h(r):
        return dense(np.asarray(r, dtype=float))[1]

    def h1(r):
        r = np.asarray(r, dtype=float)
        return dense(r)[0] / np.asarray(psi(r), dtype=float) ** 2

    def h2(r):
        r = np.asarray(r, dtype=float)
        p, p1, p2 = (np.asarray(f(r), dtype=float) for f in (psi, psi1, psi2))
        return (-(n - 2) * p2 - 2 * p1 * h1(r)) / p

    lo, hi = min(r0, r1), max(r0, r1)
    return RadialProfile(
        psi=psi, psi1=psi1, psi2=psi2, h=h, h1=h1, h2=h2,
        domain=(lo, hi), closed=True,
        label=f"{profile_psi.label} with recovered h on [{lo}, {hi}]",
    )


def log_form_exact(r, r0, psi0, dpsi0):
    """Exact solution through the initial data, from ``v'' = 0`` in ``(ln r, ln psi)``."""
    s = r0 * dpsi0 / psi0
    return psi0 * (np.asarray(r, dtype=float) / r0) ** s

