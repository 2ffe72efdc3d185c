import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from soliton_forge.errors import ConstraintError, DomainError, ParameterError, PositivityError
from soliton_forge.profiles import (
    Signature,
    SolitonParams,
    as_exact,
    family_a_lambda_tilde,
    family_b_constants,
    make_family_A,
    make_family_B,
    make_power_profile,
    make_tabulated_profile,
    schouten_rho,
)


def test_as_exact_parses_rationals():
    assert as_exact("1/2") == Fraction(1, 2)
    assert as_exact(" -3 / 4 ") == Fraction(-3, 4)
    assert as_exact(3) == Fraction(3)
    assert isinstance(as_exact(3), Fraction)
    assert as_exact(0.25) == 0.25
    assert isinstance(as_exact(0.25), float)


@pytest.mark.parametrize("bad", [True, "abc", None, [1]])
def test_as_exact_rejects_non_numbers(bad):
    with pytest.raises(ParameterError):
        as_exact(bad)


def test_schouten_rho():
    assert schouten_rho(3) == Fraction(1, 4)
    assert schouten_rho(5) == Fraction(1, 8)


@pytest.mark.parametrize("eps", [(1, 1), (1, 2, 1), (-1, -1, -1)])
def test_signature_validation(eps):
    with pytest.raises(ParameterError):
        Signature(eps)


def test_signature_radius_is_quadratic_form():
    sig = Signature((1, -1, 1))
    x = np.array([[1.0, 2.0, 3.0], [0.5, 0.0, -1.0]])
    np.testing.assert_allclose(sig.radius(x), [1 - 4 + 9, 0.25 + 1])
    assert not sig.is_riemannian
    assert Signature.riemannian(4).is_riemannian


@given(
    eps=st.lists(st.sampled_from([1, -1]), min_size=3, max_size=6).filter(lambda e: 1 in e),
    r=st.floats(min_value=1e-3, max_value=1e3),
    negative=st.booleans(),
)
def test_lift_reaches_requested_radius(eps, r, negative):
    sig = Signature(tuple(eps))
    if negative and sig.is_riemannian:
        with pytest.raises(DomainError):
            sig.lift(-r)
        return
    target = -r if negative else r
    x = sig.lift(np.array([target]))
    assert x.shape == (1, sig.n)
    assert sig.radius(x)[0] == pytest.approx(target, rel=1e-12)
    assert np.all(x != 0)


def test_lift_rejects_mixed_signs():
    with pytest.raises(DomainError):
        Signature((1, 1, -1)).lift(np.array([-1.0, 1.0]))


def test_soliton_params():
    p = SolitonParams.schouten(3, 2, 1, "1/2")
    assert p.is_schouten
    assert p.rho == Fraction(1, 4)
    assert p.lambdaTilde == Fraction(1, 2)
    q = p.with_(rho=Fraction(1, 3))
    assert not q.is_schouten
    assert q.floats() == (1 / 3, 1.0, 0.5)
    with pytest.raises(ParameterError):
        SolitonParams(2, 2, Fraction(1, 2), 0, 0)


def test_family_constants_are_exact():
    assert family_a_lambda_tilde(3, 4, 1) == Fraction(0)
    assert family_a_lambda_tilde(3, 2, 3) == Fraction(3, 2)
    lam_f, lam_t = family_b_constants(3, 4, 1)
    assert (lam_f, lam_t) == (Fraction(1), Fraction(-1, 2))
    lam_f, lam_t = family_b_constants(4, 2, 1)
    assert (lam_f, lam_t) == (Fraction(2), Fraction(1, 3))
    lam_f, _ = family_b_constants(5, 2, Fraction(1, 2))
    assert lam_f == Fraction(3, 4)


def test_family_a_profile_values():
    sol, prof = make_family_A(3, 2, 3, 2, k1=1)
    r = np.array([0.5, 2.0])
    psi, p1, p2, h, h1, h2 = prof.evaluate(r)
    np.testing.assert_allclose(psi, 2 * r)
    np.testing.assert_allclose(p1, 2.0)
    np.testing.assert_allclose(p2, 0.0)
    np.testing.assert_allclose(h, 3 / (8 * r) + 1)
    np.testing.assert_allclose(h1, -3 / (8 * r**2))
    sol.check_constraints()


def test_family_a_constant_potential_flag():
    _, prof = make_family_A(3, 2, 0, 1)
    assert prof.constant_potential
    _, prof = make_family_A(3, 2, 1, 1)
    assert not prof.constant_potential


def test_family_a_negative_branch_lives_on_negative_r():
    _, prof = make_family_A(3, 2, 1, 1, negative_r=True)
    assert prof.domain[1] <= 0
    psi = prof.evaluate(np.array([-2.0, -0.5]))[0]
    np.testing.assert_allclose(psi, [2.0, 0.5])
    with pytest.raises(DomainError):
        prof.check(np.array([1.0]))


def test_family_b_profile_values():
    sol, prof = make_family_B(4, 3, 1, c=0.5, c1=2)
    r = np.array([1.0, math.e])
    psi, _, _, h, h1, _ = prof.evaluate(r)
    np.testing.assert_allclose(psi, np.sqrt(r))
    np.testing.assert_allclose(h, [2.0, 2 / 8 + 0.5 + 2])
    np.testing.assert_allclose(h1, [0.5, (2 / 4 + 0.5) / math.e])
    sol.check_constraints()


def test_tampered_family_b_fails_constraints():
    sol, _ = make_family_B(3, 2, 1)
    bad = type(sol)(sol.k2, sol.c, sol.c1, sol.params.with_(lambdaF=Fraction(2)))
    with pytest.raises(ConstraintError):
        bad.check_constraints()


@pytest.mark.parametrize("args", [(2, 2, 1), (3, 1, 1), (3, 2, 0), (3, 2, -1)])
def test_family_dimension_checks(args):
    with pytest.raises(ParameterError):
        make_family_B(*args)


def test_profile_domain_and_positivity_errors():
    prof = make_power_profile(1, Fraction(1, 2))
    with pytest.raises(DomainError):
        prof.check(np.array([-1.0]))
    r = np.linspace(0.1, 1, 6)
    tab = make_tabulated_profile(r, 1 - r + 0.05)
    with pytest.raises(DomainError):
        tab.check(np.array([2.0]))
    with pytest.raises(PositivityError):
        make_tabulated_profile(r, r - 0.5)


@pytest.mark.parametrize("make", [
    lambda: make_family_A(3, 2, 3, 1)[1],
    lambda: make_family_A(5, 4, -2, Fraction(1, 2), negative_r=True)[1],
    lambda: make_family_B(3, 2, 2, c=0.3)[1],
    lambda: make_power_profile(2, Fraction(7, 10), {"log": 0.5, "const": 1}),
])
def test_coded_derivatives_match_finite_differences(make):
    prof = make()
    sign = -1.0 if prof.domain[1] <= 0 else 1.0
    r = sign * np.geomspace(0.05, 20, 40)
    assert prof.derivative_check(r) < 1e-8


def test_tabulated_spline_reproduces_cubic():
    r = np.linspace(0.5, 3, 12)
    f = 1 + r + 0.1 * r**3
    prof = make_tabulated_profile(r, f, h=r**2)
    q = np.linspace(0.6, 2.9, 7)
    psi, p1, p2, h, h1, h2 = prof.evaluate(q)
    np.testing.assert_allclose(psi, 1 + q + 0.1 * q**3, rtol=1e-12)
    np.testing.assert_allclose(p1, 1 + 0.3 * q**2, rtol=1e-10)
    np.testing.assert_allclose(p2, 0.6 * q, rtol=1e-9)
    np.testing.assert_allclose(h1, 2 * q, rtol=1e-10)
    np.testing.assert_allclose(h2, 2.0, rtol=1e-9)
    assert prof.closed
    assert not prof.constant_potential


def test_scaled_profile():
    prof = make_power_profile(1, 1).scaled(3)
    np.testing.assert_allclose(prof.evaluate(np.array([2.0]))[0], [6.0])
    with pytest.raises(ParameterError):
        prof.scaled(0)


def test_power_profile_rejects_unknown_potential():
    with pytest.raises(ParameterError):
        make_power_profile(1, 1, "quadratic")
    with pytest.raises(ParameterError):
        make_power_profile(-1, 1)
