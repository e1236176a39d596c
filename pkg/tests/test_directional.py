import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, stats

from weissvm.directional import (
    CollinearError,
    SphereParams,
    sign_vector,
    weissfvml_log_norm_const,
    weissfvml_logpdf,
    weissfvml_norm_const,
)
from weissvm.models import WeiSSVMParams, weissvm_logpdf


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def planar_pair(alpha, beta, mu0, kappa, lam):
    """Sphere parameters for k = 2 whose tangential skew equals the planar ``lam``."""
    mu = np.array([math.cos(mu0), math.sin(mu0)])
    tangent = np.array([-math.sin(mu0), math.cos(mu0)])
    lam_vec = unit(lam * tangent + math.sqrt(max(0.0, 1 - lam * lam)) * mu)
    return SphereParams(2, mu, lam_vec, alpha, beta, kappa), WeiSSVMParams(alpha, beta, mu0, kappa, lam)


def tangent_normal_inverse_constant(k, alpha, beta, kappa):
    """``1/C_k`` by integrating the unnormalized density in (t, x) with the surface factor."""
    area = 2 * math.pi ** ((k - 1) / 2) / math.gamma((k - 1) / 2)
    th = math.tanh(kappa)

    def over_x(t):
        c = beta**alpha * (1 - th * t)
        val, _ = integrate.quad(lambda x: x ** (alpha - 1) * math.exp(-c * x**alpha), 0, np.inf, epsabs=0, epsrel=1e-13, limit=200)
        return val

    e = (k - 3) / 2
    val, _ = integrate.quad(over_x, -1, 1, weight="alg", wvar=(e, e), epsabs=0, epsrel=1e-12, limit=200)
    return area * val


# -- SphereParams / sign_vector ------------------------------------------------

def test_sphere_params_validation():
    with pytest.raises(ValueError):
        SphereParams(3, [0, 0, 1.001], [1, 0, 0])
    with pytest.raises(ValueError):
        SphereParams(3, [0, 0, 1], [1, 0])
    with pytest.raises(ValueError):
        SphereParams(1, [1.0], [1.0])
    with pytest.raises(ValueError):
        SphereParams(3, [0, 0, 1], [1, 0, 0], kappa=-1)
    p = SphereParams(3, [0, 0, 1], [1, 0, 0])
    with pytest.raises(ValueError):
        p.mu[0] = 1.0


def test_sign_vector_examples():
    np.testing.assert_allclose(sign_vector([1, 0, 0], [0, 0, 1]), [1, 0, 0])
    with pytest.raises(CollinearError):
        sign_vector([0, 0, -1], [0, 0, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
def test_sign_vector_projection(vals):
    a, b = np.array(vals[:3]), np.array(vals[3:])
    if np.linalg.norm(a) < 1e-3 or np.linalg.norm(b) < 1e-3:
        return
    theta, mu = unit(a), unit(b)
    if np.linalg.norm(np.cross(theta, mu)) < 1e-6:
        return
    s = sign_vector(theta, mu)
    assert abs(np.dot(s, mu)) < 1e-12
    assert abs(np.linalg.norm(s) - 1) < 1e-12
    # one Gram-Schmidt step
    gs = theta - np.dot(mu, theta) / np.dot(mu, mu) * mu
    np.testing.assert_allclose(s, gs / np.linalg.norm(gs), atol=1e-12)


# -- normalizing constant -------------------------------------------------------

@pytest.mark.parametrize("kappa", [0.1, 0.7, 1.5, 4.0])
def test_k3_closed_form(kappa):
    p = SphereParams(3, [0, 0, 1], [1, 0, 0], 1.7, 0.6, kappa)
    closed = 1.7 * 0.6**1.7 * math.tanh(kappa) / (4 * math.pi * kappa)
    assert weissfvml_norm_const(p) == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("kappa", [0.0, 0.3, 1.5, 3.0])
def test_k2_matches_planar_constant(kappa):
    p = SphereParams(2, [1, 0], [0, 1], 2.2, 1.4, kappa)
    assert weissfvml_norm_const(p) == pytest.approx(2.2 * 1.4**2.2 / (2 * math.pi * math.cosh(kappa)), rel=1e-10)


def test_k4_tangent_normal_oracle():
    p = SphereParams(4, [0, 0, 0, 1], [1, 0, 0, 0], 1.3, 0.8, 1.5)
    assert 1 / weissfvml_norm_const(p) == pytest.approx(tangent_normal_inverse_constant(4, 1.3, 0.8, 1.5), rel=1e-9)


@pytest.mark.parametrize("k", [2, 3, 5, 7])
def test_zero_kappa_is_uniform_sphere(k):
    mu = np.eye(k)[0]
    p = SphereParams(k, mu, np.eye(k)[1], 2.0, 1.5, 0.0)
    surface = 2 * math.pi ** (k / 2) / math.gamma(k / 2)
    assert weissfvml_norm_const(p) == pytest.approx(2.0 * 1.5**2.0 / surface, rel=1e-13)
    # and the Legendre branch approaches it continuously
    q = SphereParams(k, mu, np.eye(k)[1], 2.0, 1.5, 1e-4)
    assert weissfvml_log_norm_const(q) == pytest.approx(weissfvml_log_norm_const(p), abs=1e-7)


# -- density ------------------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(
    st.floats(0.3, 5), st.floats(0.1, 3), st.floats(-math.pi, math.pi, exclude_max=True), st.floats(0, 3),
    st.floats(-1, 1), st.floats(-math.pi, math.pi), st.floats(0.01, 4),
)
def test_k2_equals_planar(alpha, beta, mu0, kappa, lam, t, x):
    sp, pp = planar_pair(alpha, beta, mu0, kappa, lam)
    a = weissfvml_logpdf(sp, [math.cos(t), math.sin(t)], x)
    b = weissvm_logpdf(pp, t, x)
    if b == -math.inf or a == -math.inf:
        assert a < -30 and b < -30 or a == b
    else:
        assert a == pytest.approx(b, abs=1e-10)


def test_collinear_point_drops_skew():
    p = SphereParams(3, [0, 0, 1], unit([1, 1, 0]), 2.0, 1.0, 1.2)
    c = weissfvml_norm_const(p)
    for sign in (1, -1):
        val = math.exp(weissfvml_logpdf(p, [0, 0, sign], 0.7))
        assert val == pytest.approx(c * 0.7 * math.exp(-(0.7**2) * (1 - sign * math.tanh(1.2))), rel=1e-13)


def test_k3_random_point_closed_form():
    rng = np.random.default_rng(4)
    mu, lam = unit(rng.normal(size=3)), unit(rng.normal(size=3))
    theta, x = unit(rng.normal(size=3)), 0.9
    a, b, k = 1.8, 0.7, 2.2
    p = SphereParams(3, mu, lam, a, b, k)
    t = theta @ mu
    skew = 1 + math.sqrt(1 - t * t) * lam @ sign_vector(theta, mu)
    ref = a * b**a * math.tanh(k) / (4 * math.pi * k) * skew * x ** (a - 1) * math.exp(-((b * x) ** a) * (1 - math.tanh(k) * t))
    assert math.exp(weissfvml_logpdf(p, theta, x)) == pytest.approx(ref, rel=1e-10)


def test_rotation_invariance():
    rng = np.random.default_rng(8)
    for k in (3, 4, 6):
        mu, lam = unit(rng.normal(size=k)), unit(rng.normal(size=k))
        thetas = rng.normal(size=(20, k))
        thetas /= np.linalg.norm(thetas, axis=1, keepdims=True)
        x = rng.uniform(0.1, 3, 20)
        rot = stats.ortho_group.rvs(k, random_state=k)
        p = SphereParams(k, mu, lam, 1.5, 0.9, 1.3)
        q = SphereParams(k, rot @ mu, rot @ lam, 1.5, 0.9, 1.3)
        np.testing.assert_allclose(weissfvml_logpdf(q, thetas @ rot.T, x), weissfvml_logpdf(p, thetas, x), rtol=1e-11)


def test_density_rejects_bad_inputs():
    p = SphereParams(3, [0, 0, 1], [1, 0, 0], 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        weissfvml_logpdf(p, [0, 0, 2], 1.0)
    with pytest.raises(ValueError):
        weissfvml_logpdf(p, [0, 1], 1.0)
    with pytest.raises(ValueError):
        weissfvml_logpdf(p, [0, 0, 1], -1.0)
