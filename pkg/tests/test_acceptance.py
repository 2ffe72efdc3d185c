"""Acceptance criteria, each at its stated tolerance, one printed verdict line apiece.

Run alone with ``pytest tests/test_acceptance.py -v`` or ``python tests/test_acceptance.py``.
"""

import json
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from helpers import random_profile
from soliton_forge.classify import (
    CLOSED_FORM_TOL,
    certify_cylinder,
    exponent_scan,
    family_a_descriptor,
    family_b_descriptor,
    product_examples,
    verify_solution,
)
from soliton_forge.cli import main
from soliton_forge.crosscheck import ORACLE_TOL, oracle_compare
from soliton_forge.integrate import integrate_lemma
from soliton_forge.oracle import round_sphere
from soliton_forge.profiles import Signature, SolitonParams, schouten_rho
from soliton_forge.systems import lemma_ode_residual, pde_ode_consistency, schouten_residuals

WIDE_GRID = np.geomspace(1e-2, 1e2, 1000)
DIMS = [(n, m) for n in (3, 4, 5) for m in (2, 3, 4)]
K2S = (Fraction(1, 2), 1, 2)


def test_criterion_1_example_constants(criterion, capsys):
    t0 = time.perf_counter()
    code = main(["examples", "--json"])
    elapsed = time.perf_counter() - t0
    out = capsys.readouterr().out.splitlines()
    report = json.loads("\n".join(out[:-1]))
    got = [(r["lambdaF"], r["lambdaTilde"]) for r in report["examples"]]
    exact = [(e.descriptor.params.lambdaF, e.descriptor.params.lambdaTilde) for e in product_examples()]
    ok = (code == 0
          and got == [("1", "-1/2"), ("2", "0"), ("2", "1/3")]
          and exact == [(1, Fraction(-1, 2)), (2, 0), (2, Fraction(1, 3))]
          and all(isinstance(v, Fraction) for pair in exact for v in pair)
          and elapsed < 1.0)
    criterion(1, "product example constants", ok,
              f"lambdaTilde = {[g[1] for g in got]}, lambdaF = {[g[0] for g in got]}, {elapsed:.3f} s")
    assert ok


def test_criterion_2_exact_solution_residuals(criterion):
    t0 = time.perf_counter()
    worst, where = 0.0, None
    for n, m in DIMS:
        for k2 in K2S:
            descs = [family_b_descriptor(n, m, k2)]
            descs += [family_a_descriptor(n, m, lam, k2) for lam in (-1, 1, 3)]
            for d in descs:
                rep = verify_solution(d, WIDE_GRID, CLOSED_FORM_TOL)
                if rep.max_residual > worst:
                    worst, where = rep.max_residual, d.name
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 5.0
    criterion(2, "exact-solution residuals", ok, f"max {worst:.2e} ({where}), {elapsed:.2f} s")
    assert ok


def test_criterion_3_oracle_agreement(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (3, 4):
        for m in (2, 3):
            fa = round_sphere(m)
            a = family_a_descriptor(n, m, fa.lambdaF, 1)
            fb = round_sphere(m, R_squared=Fraction(m - 1, n - 2))
            b = family_b_descriptor(n, m, 1, lambdaF=fb.lambdaF)
            for d, fiber in ((a, fa), (b, fb)):
                c = oracle_compare(d.profile, d.sig, d.params, fiber, n_points=50, seed=0, tol=ORACLE_TOL)
                worst = max(worst, c.ricci_max, c.hessian_max, c.scalar_max)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-5 and elapsed < 30.0
    criterion(3, "closed form vs oracle", ok, f"max gap {worst:.2e} over 8 configurations, {elapsed:.2f} s")
    assert ok


def test_criterion_4_cylinder_certificate(criterion):
    cert = certify_cylinder(3, 1, tolerance=1e-4, seed=0)
    sph = np.asarray(cert.spherical)
    ok = (np.all(np.abs(sph - 1) <= 1e-4) and np.all(np.abs(cert.radial) <= 1e-4)
          and np.all(np.abs(np.asarray(cert.scalar) - 2) <= 1e-4) and cert.passed)
    criterion(4, "cylinder curvature certificate", ok,
              f"spherical err {cert.spherical_error:.1e}, radial {cert.radial_error:.1e}, "
              f"scalar err {cert.scalar_error:.1e}")
    assert ok


def test_criterion_5_lemma_closure(criterion):
    rng = np.random.default_rng(0)
    worst_closure = worst_drift = 0.0
    for _ in range(20):
        r0 = float(np.exp(rng.uniform(np.log(0.1), np.log(10))))
        psi0 = float(np.exp(rng.uniform(np.log(0.1), np.log(10))))
        s = float(rng.uniform(-3, 3))
        traj = integrate_lemma(r0, psi0, s * psi0 / r0, 10 * r0)
        worst_closure = max(worst_closure, traj.closure_error())
        worst_drift = max(worst_drift, traj.exponent_drift())
    ok = worst_closure < 1e-6 and worst_drift < 1e-7
    criterion(5, "lemma flow stays on power laws", ok,
              f"closure {worst_closure:.1e}, exponent drift {worst_drift:.1e}")
    assert ok


def test_criterion_6_exponent_dichotomy(criterion):
    s_values = [Fraction(k, 20) for k in range(1, 40)]
    records = exponent_scan(s_values)
    bad = []
    for rec in records:
        special = rec.s in (Fraction(1, 2), 1)
        if rec.passed != special:
            bad.append(f"s={rec.s} passed={rec.passed}")
        if not special and not (rec.law_residual < 1e-6
                                and rec.law_coefficient == pytest.approx(rec.expected_coefficient, rel=1e-8)):
            bad.append(f"s={rec.s} not r^(2s-1) shaped")
    fails = sum(not r.passed for r in records)
    ok = not bad
    criterion(6, "exponent dichotomy", ok,
              f"{fails}/37 off-branch exponents fail with R20 ~ r^(2s-1) - 1; s = 1/2, 1 pass" if ok else "; ".join(bad))
    assert ok


def test_criterion_7_lemma_necessity(criterion):
    checked = 0
    worst = 0.0
    for n, m in DIMS:
        for k2 in K2S:
            for d in (family_a_descriptor(n, m, 2, k2), family_a_descriptor(n, m, -1, k2),
                      family_b_descriptor(n, m, k2, c=Fraction(1, 3))):
                h1 = d.profile.h1(WIDE_GRID)
                assert np.all(np.abs(h1) > 0)
                R18, R19, _ = schouten_residuals(d.profile, d.params, WIDE_GRID)
                if max(np.max(np.abs(R18)), np.max(np.abs(R19))) < CLOSED_FORM_TOL:
                    worst = max(worst, float(np.max(np.abs(lemma_ode_residual(d.profile, WIDE_GRID)))))
                    checked += 1
    ok = checked == 3 * len(DIMS) * len(K2S) and worst < 1e-9
    criterion(7, "vanishing (R18, R19) forces the lemma ODE", ok,
              f"{checked} solutions, max |lemma residual| {worst:.1e}")
    assert ok


def test_criterion_8_pde_ode_consistency(criterion):
    rng = np.random.default_rng(8)
    sigs = [(1, 1, 1), (1, 1, 1, 1), (1, -1, 1), (1, 1, -1, -1), (1, 1, 1, 1, 1)]
    worst = 0.0
    for i in range(100):
        eps = sigs[i % len(sigs)]
        sig = Signature(eps)
        prof = random_profile(rng, whole_line=True)
        params = SolitonParams(sig.n, 2, schouten_rho(sig.n), rng.uniform(-2, 2), rng.uniform(-2, 2))
        x = rng.uniform(-1.5, 1.5, size=(20, sig.n))
        rep = pde_ode_consistency(prof, sig, params, x, tol=1e-12)
        worst = max(worst, rep.offdiag_identity_max)
    ok = worst < 1e-12
    criterion(8, "off-diagonal PDE = 4 eps_i eps_j x_i x_j R15", ok,
              f"max deviation {worst:.1e} over 100 profiles x 20 points")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
