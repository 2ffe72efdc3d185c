"""Closed-form curvature of ``g / psi(r)^2`` against symbolic geometry and known metrics."""

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from helpers import profile_from_sympy, random_profile, symbolic_geometry
from soliton_forge.curvature import (
    curvature_report,
    hessian_closed_form,
    radial_partials,
    ricci_closed_form,
    scalar_curvature,
    to_orthonormal_frame,
)
from soliton_forge.errors import ParameterError
from soliton_forge.profiles import RadialProfile, Signature, SolitonParams, make_family_B, make_power_profile


@pytest.mark.parametrize("eps", [(1, 1, 1), (1, -1, 1), (1, 1, 1, 1), (-1, 1, 1, -1)])
@pytest.mark.parametrize("psi_src,h_src", [
    ("1 + r**2/3", "sin(r) + r/2"),
    ("exp(r/5)", "r**3/7 - r"),
])
def test_closed_forms_match_symbolic_geometry(eps, psi_src, h_src):
    prof = profile_from_sympy(sp.sympify(psi_src), sp.sympify(h_src), domain=(-np.inf, np.inf))
    sig = Signature(eps)
    params = SolitonParams.schouten(sig.n, 2, 1, 0)
    ric_f, hess_f, scal_f, _ = symbolic_geometry(psi_src, h_src, eps)
    rng = np.random.default_rng(7)
    for x in rng.uniform(-0.9, 0.9, size=(4, sig.n)):
        ric, lam = ricci_closed_form(prof, sig, params, x)
        hess = hessian_closed_form(prof, x, sig)
        k_base, k_fiber, k_total = scalar_curvature(prof, sig, params, x)
        np.testing.assert_allclose(ric, np.array(ric_f(list(x)), dtype=float), atol=1e-12)
        np.testing.assert_allclose(hess, np.array(hess_f(list(x)), dtype=float), atol=1e-12)
        assert k_base == pytest.approx(float(scal_f(list(x))), abs=1e-11)
        assert lam == 1.0
        assert k_fiber == 2.0
        assert k_total == pytest.approx(k_base + 2.0)


def _unit_sphere_profile():
    # g = 4 delta / (1 + |x|^2)^2 is the unit sphere in stereographic coordinates
    return RadialProfile(
        psi=lambda r: (1 + np.asarray(r, dtype=float)) / 2,
        psi1=lambda r: np.full(np.shape(r), 0.5),
        psi2=lambda r: np.zeros(np.shape(r)),
        h=lambda r: np.zeros(np.shape(r)),
        h1=lambda r: np.zeros(np.shape(r)),
        h2=lambda r: np.zeros(np.shape(r)),
        label="unit sphere",
    )


@pytest.mark.parametrize("n", [3, 4, 5])
def test_sign_convention_is_positive_on_spheres(n):
    prof, sig = _unit_sphere_profile(), Signature.riemannian(n)
    params = SolitonParams.schouten(n, 2, 0, 0)
    x = np.linspace(0.1, 0.4, n)
    ric, _ = ricci_closed_form(prof, sig, params, x)
    g = np.eye(n) / prof.psi(sig.radius(x)) ** 2
    np.testing.assert_allclose(ric, (n - 1) * g, atol=1e-12)
    assert scalar_curvature(prof, sig, params, x)[0] == pytest.approx(n * (n - 1))


def test_family_b_base_is_the_unit_cylinder():
    _, prof = make_family_B(3, 2, 1)
    params = SolitonParams.schouten(3, 2, 1, 0)
    x = np.array([[1.0, 0.0, 0.0], [0.3, -1.2, 0.4]])
    assert np.allclose(scalar_curvature(prof, Signature.riemannian(3), params, x)[0], 2.0)


finite = st.floats(min_value=-1.5, max_value=1.5, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(3, 6), mixed=st.booleans(), data=st.data())
def test_ricci_and_hessian_are_symmetric(seed, n, mixed, data):
    rng = np.random.default_rng(seed)
    eps = tuple([1] * (n - 1) + [-1 if mixed else 1])
    sig = Signature(eps)
    prof = random_profile(rng, whole_line=True)
    x = np.array(data.draw(st.lists(finite, min_size=n, max_size=n)))
    params = SolitonParams.schouten(n, 2, 1, 0)
    ric, _ = ricci_closed_form(prof, sig, params, x)
    hess = hessian_closed_form(prof, x, sig)
    np.testing.assert_allclose(ric, ric.T, atol=1e-12)
    np.testing.assert_allclose(hess, hess.T, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), c=st.floats(min_value=0.1, max_value=10))
def test_homothety_scaling(seed, c):
    """``psi -> c psi`` scales the metric by ``1/c^2``: Ricci and Hess fixed, scalar times ``c^2``."""
    rng = np.random.default_rng(seed)
    prof = random_profile(rng)
    sig = Signature.riemannian(4)
    params = SolitonParams.schouten(4, 2, 0, 0)
    x = rng.uniform(0.1, 1.0, size=(5, 4))
    big = prof.scaled(c)
    np.testing.assert_allclose(ricci_closed_form(big, sig, params, x)[0],
                               ricci_closed_form(prof, sig, params, x)[0], rtol=1e-9, atol=1e-10)
    np.testing.assert_allclose(hessian_closed_form(big, x, sig), hessian_closed_form(prof, x, sig),
                               rtol=1e-9, atol=1e-10)
    np.testing.assert_allclose(scalar_curvature(big, sig, params, x)[0],
                               c**2 * scalar_curvature(prof, sig, params, x)[0], rtol=1e-9, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31))
def test_radial_covariance_under_rotations(seed):
    rng = np.random.default_rng(seed)
    prof = random_profile(rng)
    sig = Signature.riemannian(3)
    params = SolitonParams.schouten(3, 2, 0, 0)
    Q = Rotation.random(random_state=seed % 2**32).as_matrix()
    x = rng.uniform(-1, 1, size=3)
    ric, _ = ricci_closed_form(prof, sig, params, x)
    ric_rot, _ = ricci_closed_form(prof, sig, params, Q @ x)
    np.testing.assert_allclose(ric_rot, Q @ ric @ Q.T, atol=1e-10)
    hess_rot = hessian_closed_form(prof, Q @ x, sig)
    np.testing.assert_allclose(hess_rot, Q @ hessian_closed_form(prof, x, sig) @ Q.T, atol=1e-10)


def test_orthonormal_frame_and_report():
    _, prof = make_family_B(3, 2, 1)
    sig = Signature.riemannian(3)
    params = SolitonParams.schouten(3, 2, 1, 0)
    x = np.array([1.0, 2.0, 0.5])
    rep = curvature_report(prof, sig, params, x, frame="orthonormal")
    ric, _ = ricci_closed_form(prof, sig, params, x)
    np.testing.assert_allclose(rep.ric_base, to_orthonormal_frame(ric, prof, sig, x))
    # cylinder: orthonormal Ricci has eigenvalues 0, 1, 1
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rep.ric_base)), [0, 1, 1], atol=1e-12)
    assert rep.K_total == pytest.approx(rep.K_base + rep.K_fiber)
    assert rep.K_fiber == 2.0
    d = rep.to_dict()
    assert d["ric_mixed_zero"] is True and len(d["ric_base"]) == 3


def test_report_input_checks():
    prof = make_power_profile(1, 1)
    sig = Signature.riemannian(3)
    params = SolitonParams.schouten(3, 2, 0, 0)
    with pytest.raises(ParameterError):
        curvature_report(prof, sig, params, np.ones((2, 3)))
    with pytest.raises(ParameterError):
        curvature_report(prof, sig, params, np.ones(3), frame="polar")
    with pytest.raises(ParameterError):
        radial_partials(prof, sig, np.ones(4))
