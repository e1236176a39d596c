"""Likelihoods, maximum-likelihood fitting, information criteria and LR tests.

Fitting is derivative-free (Nelder-Mead) in unconstrained coordinates:
positive parameters are optimized on the log scale, angles are optimized
freely and wrapped, and each skewness ``lam`` in ``[-1, 1]`` is written as
``sin(l)`` so that the boundary values are attained exactly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize as sp_optimize
from scipy import special

from .models import (
    GGSSVMParams,
    IndepParams,
    JWParams,
    MSKSParams,
    WeiSSVMParams,
    ggssvm_logpdf,
    indep_logpdf,
    jw_logpdf,
    ks_log_norm_const,
    log_cosh,
    ms_ks_logpdf,
    wrap_angle,
)
from .optimize import NelderMeadConfig, nelder_mead
from .specfun import chi_square_sf

__all__ = [
    "MODELS",
    "PARAM_COUNTS",
    "BoundaryError",
    "ConvergenceError",
    "FitResult",
    "TestResult",
    "aic",
    "bic",
    "weissvm_loglik",
    "weissvm_score",
    "loglik",
    "weibull_mle",
    "fit",
    "fit_models",
    "lr_statistic",
    "lr_test_jw",
    "lr_test_indep",
]

LOG_KAPPA_ZERO = -10.0
KS_TRUNCATION_TOL = 1e-13


class BoundaryError(ValueError):
    """The score is not defined at a boundary point of the parameter space."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, fits=()):
        super().__init__(message)
        self.fits = tuple(fits)


def aic(mll: float, k: int) -> float:
    return 2.0 * k - 2.0 * mll


def bic(mll: float, k: int, n: int) -> float:
    return k * math.log(n) - 2.0 * mll


# ---------------------------------------------------------------------------
# likelihood and score


def _as_data(theta, x):
    theta = np.asarray(theta, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if theta.size == 0:
        raise ValueError("empty data")
    if theta.shape != x.shape:
        raise ValueError("theta and x must have the same length")
    if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(x))):
        raise ValueError("data must be finite")
    return theta, x


def weissvm_loglik(p: WeiSSVMParams, theta, x) -> float:
    """WeiSSVM log-likelihood written as sums over the sample."""
    theta, x = _as_data(theta, x)
    if np.any(x < 0):
        raise ValueError("lengths must be nonnegative")
    n = theta.size
    phi = theta - p.mu
    skew = 1.0 + p.lam * np.sin(phi)
    if np.any(skew <= 0):
        return -math.inf
    with np.errstate(divide="ignore"):
        return float(
            np.sum(special.xlogy(p.alpha - 1.0, x))
            - p.beta**p.alpha * np.sum(x**p.alpha * (1.0 - math.tanh(p.kappa) * np.cos(phi)))
            + np.sum(np.log(skew))
            + n * (p.alpha * math.log(p.beta) + math.log(p.alpha) - math.log(2.0 * math.pi) - log_cosh(p.kappa))
        )


def weissvm_score(p: WeiSSVMParams, theta, x) -> np.ndarray:
    """Analytic gradient ``(d/dalpha, d/dbeta, d/dmu, d/dkappa, d/dlam)`` of the log-likelihood."""
    theta, x = _as_data(theta, x)
    if np.any(x <= 0):
        raise ValueError("score needs strictly positive lengths")
    phi = theta - p.mu
    s, c = np.sin(phi), np.cos(phi)
    skew = 1.0 + p.lam * s
    if abs(p.lam) >= 1.0 or np.any(skew <= 0):
        raise BoundaryError("score undefined on the |lam| = 1 boundary")
    n = theta.size
    a, b = p.alpha, p.beta
    th = math.tanh(p.kappa)
    xa = x**a
    shrink = 1.0 - th * c
    return np.array(
        [
            np.sum(np.log(x)) - b**a * np.sum(np.log(b * x) * xa * shrink) + n * (math.log(b) + 1.0 / a),
            -a * b ** (a - 1.0) * np.sum(xa * shrink) + n * a / b,
            b**a * th * np.sum(xa * s) - p.lam * np.sum(c / skew),
            b**a / math.cosh(p.kappa) ** 2 * np.sum(xa * c) - n * th,
            np.sum(s / skew),
        ]
    )


# ---------------------------------------------------------------------------
# model registry


def _lam_from(l):
    return math.sin(l)


def _lam_to(lam):
    return math.asin(min(1.0, max(-1.0, lam)))


def _kappa_to(kappa):
    return math.log(max(kappa, math.exp(LOG_KAPPA_ZERO - 1.0)))


def _sum_logpdf(fn):
    def ll(p, theta, x):
        v = float(np.sum(fn(p, theta, x)))
        return v if not math.isnan(v) else -math.inf

    return ll


def _ms_ks_loglik(p, theta, x):
    log_norm = ks_log_norm_const(p, KS_TRUNCATION_TOL)
    return float(np.sum(ms_ks_logpdf(p, theta, x, log_norm=log_norm)))


def _ggssvm_loglik(p, theta, x):
    return float(np.sum(ggssvm_logpdf(p, theta, x)))


@dataclass(frozen=True)
class ModelSpec:
    name: str
    params: type
    k: int
    positive_lengths: bool
    to_params: Callable[[np.ndarray], object]
    from_params: Callable[[object], np.ndarray]
    loglik: Callable


def _weissvm_to(v):
    return WeiSSVMParams(math.exp(v[0]), math.exp(v[1]), v[2], math.exp(v[3]), _lam_from(v[4]))


def _weissvm_from(p):
    return np.array([math.log(p.alpha), math.log(p.beta), p.mu, _kappa_to(p.kappa), _lam_to(p.lam)])


def _ggssvm_to(v):
    return GGSSVMParams(
        math.exp(v[0]), math.exp(v[1]), math.exp(v[2]), v[3], math.exp(v[4]), _lam_from(v[5])
    )


def _ggssvm_from(p):
    return np.array(
        [math.log(p.alpha), math.log(p.beta), math.log(p.gamma), p.mu, _kappa_to(p.kappa), _lam_to(p.lam)]
    )


def _jw_to(v):
    return JWParams(math.exp(v[0]), v[1], math.exp(v[2]))


def _jw_from(p):
    return np.array([math.log(p.beta), p.mu, _kappa_to(p.kappa)])


def _indep_to(v):
    return IndepParams(math.exp(v[0]), math.exp(v[1]), v[2], _lam_from(v[3]))


def _indep_from(p):
    return np.array([math.log(p.alpha), math.log(p.beta), p.mu, _lam_to(p.lam)])


def _ms_to(v):
    return MSKSParams(v[0], math.exp(v[1]), math.exp(v[2]), v[3], v[4], 0.0, math.exp(v[5]), 0.0)


def _ms_from(p):
    return np.array(
        [p.mu_prime, math.log(p.sigma), math.log(max(p.lam, 1e-8)), p.nu, p.mu1, _kappa_to(p.kappa1)]
    )


def _ks_to(v):
    return MSKSParams(v[0], math.exp(v[1]), math.exp(v[2]), v[3], v[4], v[5], math.exp(v[6]), math.exp(v[7]))


def _ks_from(p):
    return np.array(
        [
            p.mu_prime,
            math.log(p.sigma),
            math.log(max(p.lam, 1e-8)),
            p.nu,
            p.mu1,
            p.mu2,
            _kappa_to(p.kappa1),
            _kappa_to(p.kappa2),
        ]
    )


MODELS = {
    "weissvm": ModelSpec("weissvm", WeiSSVMParams, 5, True, _weissvm_to, _weissvm_from, weissvm_loglik),
    "ggssvm": ModelSpec("ggssvm", GGSSVMParams, 6, True, _ggssvm_to, _ggssvm_from, _ggssvm_loglik),
    "jw": ModelSpec("jw", JWParams, 3, True, _jw_to, _jw_from, _sum_logpdf(jw_logpdf)),
    "indep": ModelSpec("indep", IndepParams, 4, True, _indep_to, _indep_from, _sum_logpdf(indep_logpdf)),
    "ms": ModelSpec("ms", MSKSParams, 6, False, _ms_to, _ms_from, _ms_ks_loglik),
    "ks": ModelSpec("ks", MSKSParams, 8, False, _ks_to, _ks_from, _ms_ks_loglik),
}
PARAM_COUNTS = {name: spec.k for name, spec in MODELS.items()}


def _spec(model) -> ModelSpec:
    try:
        return MODELS[model]
    except KeyError:
        raise ValueError(f"unknown model {model!r}; choose from {sorted(MODELS)}") from None


def loglik(model: str, params, theta, x) -> float:
    theta, x = _as_data(theta, x)
    return _spec(model).loglik(params, theta, x)


# ---------------------------------------------------------------------------
# starting values


def weibull_mle(x) -> tuple[float, float]:
    """Weibull ``(shape, rate)`` maximum likelihood estimate for positive lengths."""
    x = np.asarray(x, dtype=float)
    if x.size < 2 or np.any(x <= 0):
        raise ValueError("need at least two positive lengths")
    lx = np.log(x)
    if np.ptp(lx) == 0:
        raise ValueError("all lengths equal: Weibull MLE does not exist")
    lx0 = lx - lx.max()  # scale-free, avoids overflow in x**a

    def profile(log_a):
        a = math.exp(log_a)
        w = np.exp(a * lx0)
        return 1.0 / a + lx.mean() - np.sum(w * lx) / np.sum(w)

    log_a = sp_optimize.brentq(profile, math.log(1e-3), math.log(1e3), xtol=1e-14)
    a = math.exp(log_a)
    rate = float((x.size / np.sum(np.exp(a * lx0))) ** (1.0 / a) / math.exp(lx.max()))
    return a, rate


def _circ_mean(theta):
    return math.atan2(np.mean(np.sin(theta)), np.mean(np.cos(theta)))


def _a1_inverse(r):
    # Best-Fisher approximation of the von Mises concentration
    r = min(max(r, 1e-6), 0.999)
    if r < 0.53:
        return 2 * r + r**3 + 5 * r**5 / 6
    if r < 0.85:
        return -0.4 + 1.39 * r + 0.43 / (1 - r)
    return 1 / (r**3 - 4 * r**2 + 3 * r)


def _default_init(model: str, theta, x):
    mu0 = _circ_mean(theta)
    if model in ("ms", "ks"):
        design = np.column_stack([np.ones_like(x), np.cos(theta), np.sin(theta)])
        coef, *_ = np.linalg.lstsq(design, x, rcond=None)
        resid = x - design @ coef
        sigma = max(float(np.std(resid)), 1e-3 * max(1.0, float(np.std(x))))
        lam = max(math.hypot(coef[1], coef[2]), 1e-3 * sigma)
        nu = math.atan2(coef[2], coef[1])
        r1 = math.hypot(np.mean(np.cos(theta)), np.mean(np.sin(theta)))
        kappa1 = max(_a1_inverse(r1), 0.05)
        if model == "ms":
            return MSKSParams(coef[0], sigma, lam, nu, mu0, 0.0, kappa1, 0.0)
        mu2 = 0.5 * math.atan2(np.mean(np.sin(2 * theta)), np.mean(np.cos(2 * theta)))
        return MSKSParams(coef[0], sigma, lam, nu, mu0, mu2, kappa1, 0.1)

    alpha0, beta0 = weibull_mle(x)
    rbar = float(np.mean(np.cos(theta - mu0)))
    kappa0 = min(max(2.0 * math.atanh(min(max(rbar, 0.0), 0.999)), 0.01), 5.0)
    lam0 = 2.0 * float(np.mean(np.sin(theta - mu0))) * math.cosh(0.5 * kappa0) ** 2
    lam0 = min(max(lam0, -0.95), 0.95)
    if model == "weissvm":
        return WeiSSVMParams(alpha0, beta0, mu0, kappa0, lam0)
    if model == "ggssvm":
        return GGSSVMParams(alpha0, beta0, alpha0, mu0, kappa0, lam0)
    if model == "jw":
        return JWParams(1.0 / float(np.mean(x)), mu0, kappa0)
    if model == "indep":
        lam_c = min(max(2.0 * float(np.mean(np.sin(theta - mu0))), -0.95), 0.95)
        return IndepParams(alpha0, beta0, mu0, lam_c)
    raise ValueError(model)


# ---------------------------------------------------------------------------
# fitting


@dataclass
class FitResult:
    model: str
    estimates: object
    mll: float
    aic: float
    bic: float
    n: int
    k: int
    iterations: int
    converged: bool
    final_simplex_spread: float
    starts: int = 1

    def to_dict(self):
        return {
            "model": self.model,
            "estimates": self.estimates.as_dict(),
            "mll": self.mll,
            "aic": self.aic,
            "bic": self.bic,
            "n": self.n,
            "k": self.k,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_simplex_spread": self.final_simplex_spread,
        }


@dataclass
class TestResult:
    statistic: float
    dof: int
    p_value: float
    null_fit: FitResult | None = None
    alt_fit: FitResult | None = None
    name: str = field(default="")

    __test__ = False  # not a pytest class

    def to_dict(self):
        out = {"test": self.name, "statistic": self.statistic, "dof": self.dof, "p_value": self.p_value}
        if self.null_fit is not None:
            out["null_fit"] = self.null_fit.to_dict()
        if self.alt_fit is not None:
            out["alt_fit"] = self.alt_fit.to_dict()
        return out


def _check_fit_data(spec: ModelSpec, theta, x):
    theta, x = _as_data(theta, x)
    if spec.positive_lengths and np.any(x <= 0):
        raise ValueError(f"model {spec.name!r} needs strictly positive lengths")
    if theta.size < spec.k:
        raise ValueError(f"model {spec.name!r} needs at least {spec.k} observations")
    return theta, x


_LOG_KAPPA_SLOTS = {
    "weissvm": {3: "kappa"},
    "ggssvm": {4: "kappa"},
    "jw": {2: "kappa"},
    "ms": {5: "kappa1"},
    "ks": {6: "kappa1", 7: "kappa2"},
}


def _canonical(spec: ModelSpec, v):
    """Parameters for an optimizer point, reporting log-kappa below the cutoff as kappa = 0."""
    p = spec.to_params(v)
    zeroed = {
        name: 0.0 for idx, name in _LOG_KAPPA_SLOTS.get(spec.name, {}).items() if v[idx] < LOG_KAPPA_ZERO
    }
    if zeroed:
        p = dataclasses.replace(p, **zeroed)
    # without dependence (mu, lam) and (mu + pi, -lam) are the same law; report lam >= 0
    if spec.name in ("indep", "weissvm") and getattr(p, "kappa", 0.0) == 0.0 and p.lam < 0:
        p = dataclasses.replace(p, mu=wrap_angle(p.mu + math.pi), lam=-p.lam)
    return p


def fit(
    model: str,
    theta,
    x,
    init=None,
    extra_inits: Sequence = (),
    n_random_starts: int = 5,
    seed: int = 0,
    config: NelderMeadConfig | None = None,
) -> FitResult:
    """Maximum likelihood fit of ``model`` to ``(theta, x)``.

    Starts from ``init`` (or a method-of-moments guess), every entry of
    ``extra_inits`` and ``n_random_starts`` jittered copies of the first
    start; the best maximized log-likelihood wins.
    """
    spec = _spec(model)
    theta, x = _check_fit_data(spec, theta, x)
    n = theta.size

    def objective(v):
        try:
            p = spec.to_params(v)
        except (ValueError, OverflowError):
            return -math.inf
        try:
            val = spec.loglik(p, theta, x)
        except (ValueError, OverflowError, ArithmeticError):
            return -math.inf
        return val if math.isfinite(val) else -math.inf

    base = init if init is not None else _default_init(model, theta, x)
    starts = [spec.from_params(base)] + [spec.from_params(p) for p in extra_inits]
    rng = np.random.default_rng(seed)
    for _ in range(n_random_starts):
        starts.append(starts[0] + rng.normal(0.0, 0.3, size=starts[0].size))

    best = None
    for v0 in starts:
        if not math.isfinite(objective(v0)):
            continue
        res = nelder_mead(objective, v0, config)
        if best is None or res.value > best.value:
            best = res
    if best is None:
        raise ValueError("log-likelihood is not finite at any starting point")

    est = _canonical(spec, best.x)
    mll = spec.loglik(est, theta, x)
    return FitResult(
        model=model,
        estimates=est,
        mll=mll,
        aic=aic(mll, spec.k),
        bic=bic(mll, spec.k, n),
        n=n,
        k=spec.k,
        iterations=best.iterations,
        converged=best.converged,
        final_simplex_spread=best.spread,
        starts=len(starts),
    )


def _embed(null: FitResult, target: str):
    e = null.estimates
    if null.model == "jw" and target == "weissvm":
        return WeiSSVMParams(1.0, e.beta, e.mu, e.kappa, 0.0)
    if null.model == "indep" and target == "weissvm":
        return WeiSSVMParams(e.alpha, e.beta, e.mu, 0.0, e.lam)
    if null.model == "weissvm" and target == "ggssvm":
        return GGSSVMParams(e.alpha, e.beta, e.alpha, e.mu, e.kappa, e.lam)
    if null.model == "ms" and target == "ks":
        return MSKSParams(e.mu_prime, e.sigma, e.lam, e.nu, e.mu1, 0.0, e.kappa1, 1e-4)
    raise ValueError(f"{null.model} is not nested in {target}")


NESTING = {"weissvm": ("jw", "indep"), "ggssvm": ("weissvm",), "ks": ("ms",)}


def fit_models(models: Sequence[str], theta, x, **kwargs) -> dict:
    """Fit several models, seeding each embedding model with its fitted submodels.

    Returns ``{model: FitResult or Exception}`` so one failure does not stop
    the others.
    """
    order = ["jw", "indep", "weissvm", "ggssvm", "ms", "ks"]
    wanted = list(dict.fromkeys(models))
    for m in wanted:
        _spec(m)
    needed = set(wanted)
    # fit submodels that feed a requested embedding model as well
    for m in wanted:
        needed.update(NESTING.get(m, ()))
        if m == "ggssvm":
            needed.update(NESTING["weissvm"])
    results = {}
    for m in order:
        if m not in needed:
            continue
        inits = [
            _embed(results[sub], m)
            for sub in NESTING.get(m, ())
            if isinstance(results.get(sub), FitResult)
        ]
        try:
            results[m] = fit(m, theta, x, extra_inits=inits, **kwargs)
        except Exception as exc:  # reported per model
            results[m] = exc
    return {m: results[m] for m in wanted}


# ---------------------------------------------------------------------------
# likelihood ratio tests


def lr_statistic(null_mll: float, alt_mll: float) -> float:
    return -2.0 * (null_mll - alt_mll)


def _lr_test(null_model, dof, theta, x, name, **kwargs) -> TestResult:
    null = fit(null_model, theta, x, **kwargs)
    alt = fit("weissvm", theta, x, extra_inits=[_embed(null, "weissvm")], **kwargs)
    if not (null.converged and alt.converged):
        raise ConvergenceError(f"{name}: a fit did not converge", (null, alt))
    stat = lr_statistic(null.mll, alt.mll)
    # nested fits: a tiny negative value is optimizer noise
    stat = max(stat, 0.0)
    return TestResult(stat, dof, chi_square_sf(stat, dof), null, alt, name)


def lr_test_jw(theta, x, **kwargs) -> TestResult:
    """LR test of the Johnson-Wehrly submodel (``alpha = 1`` and ``lam = 0``), 2 dof."""
    return _lr_test("jw", 2, theta, x, "jw", **kwargs)


def lr_test_indep(theta, x, **kwargs) -> TestResult:
    """LR test of circular-linear independence (``kappa = 0``), 1 dof."""
    return _lr_test("indep", 1, theta, x, "indep", **kwargs)
