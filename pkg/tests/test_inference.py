import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize, stats

from weissvm.inference import (
    PARAM_COUNTS,
    BoundaryError,
    ConvergenceError,
    aic,
    bic,
    fit,
    fit_models,
    lr_statistic,
    lr_test_indep,
    lr_test_jw,
    weibull_mle,
    weissvm_loglik,
    weissvm_score,
)
from weissvm.models import WeiSSVMParams, weissvm_logpdf
from weissvm.optimize import NelderMeadConfig
from weissvm.sampling import sample_weissvm
from weissvm.specfun import chi_square_sf


@pytest.fixture(scope="module")
def sim300():
    return sample_weissvm(WeiSSVMParams(2, 1, 0.5, 1.5, 0.5), 300, 42)


# -- log-likelihood / score ------------------------------------------------------

def test_loglik_single_observation():
    assert weissvm_loglik(WeiSSVMParams(1, 1, 0, 0, 0), [0.0], [1.0]) == pytest.approx(-1 - math.log(2 * math.pi))


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0.3, 5), st.floats(0.1, 3), st.floats(-math.pi, math.pi, exclude_max=True),
    st.floats(0, 3), st.floats(-0.99, 0.99), st.integers(0, 10**6),
)
def test_loglik_equals_sum_of_logpdf(a, b, mu, k, lam, seed):
    rng = np.random.default_rng(seed)
    theta, x = rng.uniform(-math.pi, math.pi, 30), rng.gamma(2.0, 1.0, 30)
    p = WeiSSVMParams(a, b, mu, k, lam)
    assert weissvm_loglik(p, theta, x) == pytest.approx(float(np.sum(weissvm_logpdf(p, theta, x))), rel=1e-10, abs=1e-10)


def test_loglik_rejects_empty_and_flags_zero_skew():
    with pytest.raises(ValueError):
        weissvm_loglik(WeiSSVMParams(1, 1, 0, 0, 0), [], [])
    assert weissvm_loglik(WeiSSVMParams(2, 1, 0, 0, 1), [-math.pi / 2, 0.0], [1.0, 1.0]) == -math.inf


def _central_difference(p, theta, x, i, h=1e-6):
    v = np.array(p.as_tuple(), dtype=float)
    step = h * max(1.0, abs(v[i]))
    up, dn = v.copy(), v.copy()
    up[i] += step
    dn[i] -= step
    return (weissvm_loglik(WeiSSVMParams(*up), theta, x) - weissvm_loglik(WeiSSVMParams(*dn), theta, x)) / (2 * step)


@pytest.mark.parametrize("seed", range(5))
def test_score_finite_differences(seed):
    rng = np.random.default_rng(seed)
    p = WeiSSVMParams(rng.uniform(0.5, 4), rng.uniform(0.3, 2), rng.uniform(-3, 3), rng.uniform(0.1, 3), rng.uniform(-0.9, 0.9))
    theta, x = sample_weissvm(p, 50, rng)
    s = weissvm_score(p, theta, x)
    for i in range(5):
        fd = _central_difference(p, theta, x, i)
        assert s[i] == pytest.approx(fd, rel=1e-5, abs=1e-5 * max(1.0, np.abs(s).max())), i


def test_score_specializations():
    rng = np.random.default_rng(3)
    theta, x = rng.uniform(-3, 3, 40), rng.gamma(2, 1, 40)
    p = WeiSSVMParams(1.7, 0.8, 0.4, 0.0, 0.3)
    assert weissvm_score(p, theta, x)[3] == pytest.approx(0.8**1.7 * np.sum(x**1.7 * np.cos(theta - 0.4)), rel=1e-13)
    q = WeiSSVMParams(1.7, 0.8, 0.4, 1.0, 0.0)
    assert weissvm_score(q, theta, x)[4] == pytest.approx(np.sum(np.sin(theta - 0.4)), rel=1e-13)


def test_score_boundary():
    with pytest.raises(BoundaryError):
        weissvm_score(WeiSSVMParams(2, 1, 0, 1, 1.0), [0.1], [1.0])


# -- information criteria ------------------------------------------------------

def test_aic_bic_arithmetic():
    assert aic(-168.57, 5) == pytest.approx(347.14)
    assert bic(-168.57, 5, 31) == pytest.approx(5 * math.log(31) + 337.14)
    assert PARAM_COUNTS == {"weissvm": 5, "ggssvm": 6, "jw": 3, "indep": 4, "ms": 6, "ks": 8}


# -- fitting -------------------------------------------------------------------------

def test_fit_reports_consistent_criteria(sim300):
    r = fit("weissvm", *sim300)
    assert r.converged
    assert r.aic == pytest.approx(2 * 5 - 2 * r.mll)
    assert r.bic == pytest.approx(5 * math.log(300) - 2 * r.mll)
    assert r.mll == pytest.approx(weissvm_loglik(r.estimates, *sim300), rel=1e-14)
    d = r.to_dict()
    assert set(d) >= {"model", "estimates", "mll", "aic", "bic", "converged"}


def test_score_vanishes_at_interior_mle(sim300):
    r = fit("weissvm", *sim300)
    assert abs(r.estimates.lam) < 1
    s = weissvm_score(r.estimates, *sim300)
    assert np.linalg.norm(s) / 300 < 1e-4


def test_indep_fit_factorizes():
    theta, x = sample_weissvm(WeiSSVMParams(1.7, 0.8, 0.6, 0, 0.5), 400, 7)
    r = fit("indep", theta, x)

    # oracle: scipy's Weibull log density, tightly minimized in (log shape, log scale)
    nll = lambda v: -np.sum(stats.weibull_min.logpdf(x, math.exp(v[0]), scale=math.exp(v[1])))
    w = optimize.minimize(nll, [0.0, 0.0], method="Nelder-Mead", options=dict(xatol=1e-12, fatol=1e-14, maxiter=20000))
    shape, rate = math.exp(w.x[0]), math.exp(-w.x[1])
    assert r.estimates.alpha == pytest.approx(shape, abs=1e-6)
    assert r.estimates.beta == pytest.approx(rate, abs=1e-6)

    card = lambda v: -np.sum(np.log1p(v[1] * np.sin(theta - v[0])))
    c = optimize.minimize(card, [0.5, 0.4], method="L-BFGS-B", bounds=[(-4, 4), (-1, 1)], options=dict(ftol=1e-15, gtol=1e-12))
    assert r.estimates.mu == pytest.approx(c.x[0], abs=1e-6)
    assert r.estimates.lam == pytest.approx(c.x[1], abs=1e-6)


def test_weibull_mle_profile():
    x = stats.weibull_min(2.5, scale=2.0).rvs(500, random_state=1)
    a, rate = weibull_mle(x)
    score_a = 1 / a + np.mean(np.log(x)) - np.sum(x**a * np.log(x)) / np.sum(x**a)
    assert abs(score_a) < 1e-10
    assert rate == pytest.approx((500 / np.sum(x**a)) ** (1 / a), rel=1e-12)
    with pytest.raises(ValueError):
        weibull_mle([1.0, 1.0, 1.0])


def test_independence_data_gives_small_kappa():
    theta, x = sample_weissvm(WeiSSVMParams(2, 1, 0.3, 0.0, 0.4), 10_000, 5)
    r = fit("weissvm", theta, x, n_random_starts=2)
    assert r.estimates.kappa < 0.05


def test_fit_rotation_equivariance(sim300):
    theta, x = sim300
    delta = 1.1
    a = fit("weissvm", theta, x)
    b = fit("weissvm", np.angle(np.exp(1j * (theta + delta))), x)
    shift = math.remainder(b.estimates.mu - a.estimates.mu - delta, 2 * math.pi)
    assert abs(shift) < 1e-4
    assert b.mll == pytest.approx(a.mll, abs=1e-7)
    for name in ("alpha", "beta", "kappa", "lam"):
        assert getattr(b.estimates, name) == pytest.approx(getattr(a.estimates, name), rel=1e-4, abs=1e-5)


def test_fit_scale_equivariance(sim300):
    theta, x = sim300
    c = 7.5
    a = fit_models(["weissvm", "jw", "indep"], theta, x)
    b = fit_models(["weissvm", "jw", "indep"], theta, c * x)
    assert b["weissvm"].estimates.beta == pytest.approx(a["weissvm"].estimates.beta / c, rel=1e-4)
    for name in ("alpha", "mu", "kappa", "lam"):
        assert getattr(b["weissvm"].estimates, name) == pytest.approx(getattr(a["weissvm"].estimates, name), rel=1e-4, abs=1e-5)
    gap_a = a["weissvm"].aic - a["jw"].aic
    gap_b = b["weissvm"].aic - b["jw"].aic
    assert gap_b == pytest.approx(gap_a, abs=1e-5)


def test_nested_mll_ordering(sim300):
    res = fit_models(["jw", "weissvm", "ggssvm", "indep"], *sim300)
    assert res["jw"].mll <= res["weissvm"].mll + 1e-9
    assert res["indep"].mll <= res["weissvm"].mll + 1e-9
    assert res["weissvm"].mll <= res["ggssvm"].mll + 1e-9


def test_fit_models_reports_failures_inline():
    theta = np.array([0.1, 0.2, -0.3, 1.0, 2.0, -2.5, 0.7])
    x = np.array([1.0, 2.0, 0.5, 0.0, 1.2, 0.3, 0.9])
    res = fit_models(["weissvm", "ms"], theta, x)
    assert isinstance(res["weissvm"], ValueError)
    assert res["ms"].converged


def test_fit_ms_and_ks_on_real_line_data():
    rng = np.random.default_rng(2)
    theta = rng.vonmises(0.5, 1.5, 300)
    x = 10 + 3 * np.cos(theta - 1.0) + rng.normal(0, 2, 300)
    res = fit_models(["ms", "ks"], theta, x)
    assert res["ms"].converged and res["ks"].converged
    assert res["ms"].mll <= res["ks"].mll + 1e-9
    assert res["ms"].estimates.sigma == pytest.approx(2, rel=0.15)


def test_fit_rejects_bad_model_and_data():
    with pytest.raises(ValueError):
        fit("nope", [0.1], [1.0])
    with pytest.raises(ValueError):
        fit("weissvm", [0.1, 0.2, 0.3, 0.4, 0.5], [1.0, -1.0, 1.0, 1.0, 1.0])


def test_iteration_cap_surfaces_as_not_converged(sim300):
    r = fit("weissvm", *sim300, n_random_starts=0, config=NelderMeadConfig(max_iter=10))
    assert not r.converged


# -- likelihood ratio tests ---------------------------------------------------------

def test_lr_statistic_reported_values():
    assert lr_statistic(-182.93, -168.57) == pytest.approx(28.72)
    assert lr_statistic(-187.25, -168.57) == pytest.approx(37.36)
    assert lr_statistic(-134.32, -125.70) == pytest.approx(17.24)
    assert chi_square_sf(17.24, 1) < 0.001


def test_lr_tests_on_dependent_data(sim300):
    t = lr_test_jw(*sim300)
    assert t.dof == 2 and t.statistic >= 0
    assert t.p_value == pytest.approx(chi_square_sf(t.statistic, 2))
    assert t.statistic == pytest.approx(-2 * (t.null_fit.mll - t.alt_fit.mll), abs=1e-12)
    u = lr_test_indep(*sim300)
    assert u.dof == 1 and u.p_value < 1e-6


def test_lr_test_convergence_failure_propagates(sim300):
    with pytest.raises(ConvergenceError):
        lr_test_jw(*sim300, n_random_starts=0, config=NelderMeadConfig(max_iter=3))


def test_lr_indep_null_p_values_not_degenerate():
    # small null simulation: p-values spread over (0, 1) rather than piling up at 0
    ps = []
    for seed in range(30):
        theta, x = sample_weissvm(WeiSSVMParams(1.5, 1, 0, 0, 0.3), 150, 1000 + seed)
        ps.append(lr_test_indep(theta, x, n_random_starts=1).p_value)
    ps = np.array(ps)
    assert np.mean(ps < 0.05) <= 0.2
    assert stats.kstest(ps, "uniform").pvalue > 0.001
