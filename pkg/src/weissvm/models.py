"""Parameter containers and densities for the cylindrical models.

All densities are evaluated in log space and broadcast over numpy arrays of
angles ``theta`` (radians) and lengths ``x``.  The ``*_pdf`` helpers are thin
exponentials of the corresponding log densities.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields

import numpy as np
from scipy import special

from .specfun import legendre_q, log_bessel_i

__all__ = [
    "wrap_angle",
    "WeiSSVMParams",
    "GGSSVMParams",
    "JWParams",
    "IndepParams",
    "MSKSParams",
    "SeriesError",
    "weissvm_logpdf",
    "weissvm_pdf",
    "weissvm_circular_marginal",
    "weissvm_linear_marginal",
    "weissvm_conditional_circular",
    "weissvm_conditional_linear",
    "conditional_linear_rate",
    "weibull_logpdf",
    "ggssvm_log_norm_const",
    "ggssvm_logpdf",
    "jw_logpdf",
    "indep_logpdf",
    "ks_norm_const",
    "ks_log_norm_const",
    "ms_ks_logpdf",
]

TWO_PI = 2.0 * math.pi
LOG_2PI = math.log(TWO_PI)


class SeriesError(RuntimeError):
    pass


def wrap_angle(theta):
    """Map angles (radians) into ``[-pi, pi)``."""
    theta = np.asarray(theta, dtype=float)
    out = np.mod(theta + math.pi, TWO_PI) - math.pi
    # mod can round up to exactly 2*pi for tiny negative inputs
    out = np.where(out >= math.pi, out - TWO_PI, out)
    # in-range values pass through bit for bit
    out = np.where((theta >= -math.pi) & (theta < math.pi), theta, out)
    return out if out.ndim else float(out)


def log_cosh(k):
    k = np.abs(k)
    return k + np.log1p(np.exp(-2.0 * k)) - math.log(2.0)


class _Params:
    """Shared helpers for the frozen parameter dataclasses."""

    @classmethod
    def names(cls):
        return tuple(f.name for f in fields(cls))

    def as_tuple(self):
        return astuple(self)

    def as_dict(self):
        return dict(zip(self.names(), self.as_tuple()))

    def _check_finite(self):
        for name, value in self.as_dict().items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    def _set(self, name, value):
        object.__setattr__(self, name, float(value))


def _positive(name, value):
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


def _nonnegative(name, value):
    if not value >= 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")


def _unit_interval(name, value):
    if not -1.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [-1, 1], got {value!r}")


@dataclass(frozen=True)
class WeiSSVMParams(_Params):
    """Weibull sine-skewed von Mises parameters.

    alpha, beta : linear shape and rate (``beta`` multiplies ``x``)
    mu : circular location, wrapped into ``[-pi, pi)``
    kappa : concentration / circular-linear dependence
    lam : circular skewness in ``[-1, 1]``
    """

    alpha: float
    beta: float
    mu: float
    kappa: float
    lam: float

    def __post_init__(self):
        self._check_finite()
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        _nonnegative("kappa", self.kappa)
        _unit_interval("lam", self.lam)
        for name in self.names():
            self._set(name, getattr(self, name))
        self._set("mu", wrap_angle(self.mu))


@dataclass(frozen=True)
class GGSSVMParams(_Params):
    alpha: float
    beta: float
    gamma: float
    mu: float
    kappa: float
    lam: float

    def __post_init__(self):
        self._check_finite()
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        _positive("gamma", self.gamma)
        _nonnegative("kappa", self.kappa)
        _unit_interval("lam", self.lam)
        for name in self.names():
            self._set(name, getattr(self, name))
        self._set("mu", wrap_angle(self.mu))


@dataclass(frozen=True)
class JWParams(_Params):
    """Johnson-Wehrly parameters in the ``(beta, mu, kappa)`` form."""

    beta: float
    mu: float
    kappa: float

    def __post_init__(self):
        self._check_finite()
        _positive("beta", self.beta)
        _nonnegative("kappa", self.kappa)
        for name in self.names():
            self._set(name, getattr(self, name))
        self._set("mu", wrap_angle(self.mu))


@dataclass(frozen=True)
class IndepParams(_Params):
    """Weibull x cardioid; the cardioid peaks at ``mu + pi/2`` when ``lam > 0``."""

    alpha: float
    beta: float
    mu: float
    lam: float

    def __post_init__(self):
        self._check_finite()
        _positive("alpha", self.alpha)
        _positive("beta", self.beta)
        _unit_interval("lam", self.lam)
        for name in self.names():
            self._set(name, getattr(self, name))
        self._set("mu", wrap_angle(self.mu))

    @property
    def mode_direction(self):
        shift = 0.5 * math.pi if self.lam >= 0 else -0.5 * math.pi
        return wrap_angle(self.mu + shift)


@dataclass(frozen=True)
class MSKSParams(_Params):
    """Mardia-Sutton / Kato-Shimizu parameters (``kappa2 = 0`` is Mardia-Sutton).

    The linear mean is ``mu_prime + lam * cos(theta - nu)``.
    """

    mu_prime: float
    sigma: float
    lam: float
    nu: float
    mu1: float
    mu2: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0

    def __post_init__(self):
        self._check_finite()
        _positive("sigma", self.sigma)
        _nonnegative("lam", self.lam)
        _nonnegative("kappa1", self.kappa1)
        _nonnegative("kappa2", self.kappa2)
        for name in self.names():
            self._set(name, getattr(self, name))
        self._set("nu", wrap_angle(self.nu))
        self._set("mu1", wrap_angle(self.mu1))
        # mu2 only enters through cos(2(theta - mu2)): period pi
        self._set("mu2", 0.5 * wrap_angle(2.0 * self.mu2))


def _lengths(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("lengths must be nonnegative")
    if np.any(np.isnan(x)):
        raise ValueError("lengths must not be NaN")
    return x


def _scalar(out):
    out = np.asarray(out)
    return out if out.ndim else float(out)


def _log_skew(lam, phi):
    skew = 1.0 + lam * np.sin(phi)
    with np.errstate(divide="ignore"):
        return np.where(skew > 0, np.log(np.where(skew > 0, skew, 1.0)), -np.inf)


def weibull_logpdf(x, alpha, rate):
    """Log density ``alpha rate^alpha x^(alpha-1) exp(-(rate x)^alpha)``."""
    x = _lengths(x)
    rate = np.asarray(rate, dtype=float)
    with np.errstate(divide="ignore"):
        out = (
            math.log(alpha)
            + alpha * np.log(rate)
            + special.xlogy(alpha - 1.0, x)
            - (rate * x) ** alpha
        )
    return _scalar(out)


def weissvm_logpdf(p: WeiSSVMParams, theta, x):
    """Joint log density of the WeiSSVM at ``(theta, x)``; ``-inf`` where the skew factor vanishes."""
    x = _lengths(x)
    phi = np.asarray(theta, dtype=float) - p.mu
    with np.errstate(divide="ignore"):
        out = (
            math.log(p.alpha)
            + p.alpha * math.log(p.beta)
            - LOG_2PI
            - log_cosh(p.kappa)
            + _log_skew(p.lam, phi)
            + special.xlogy(p.alpha - 1.0, x)
            - (p.beta * x) ** p.alpha * (1.0 - math.tanh(p.kappa) * np.cos(phi))
        )
    return _scalar(out)


def weissvm_pdf(p: WeiSSVMParams, theta, x):
    return _scalar(np.exp(weissvm_logpdf(p, theta, x)))


def weissvm_circular_marginal(p: WeiSSVMParams, theta):
    """Sine-skewed wrapped Cauchy density of the angle, with ``rho = tanh(kappa/2)``."""
    rho = math.tanh(0.5 * p.kappa)
    phi = np.asarray(theta, dtype=float) - p.mu
    out = (
        (1.0 - rho * rho)
        / TWO_PI
        * (1.0 + p.lam * np.sin(phi))
        / (1.0 + rho * rho - 2.0 * rho * np.cos(phi))
    )
    return _scalar(np.maximum(out, 0.0))


def weissvm_linear_marginal(p: WeiSSVMParams, x, log=False):
    x = _lengths(x)
    u = (p.beta * x) ** p.alpha
    out = (
        log_bessel_i(0, u * math.tanh(p.kappa))
        - log_cosh(p.kappa)
        + weibull_logpdf(x, p.alpha, p.beta)
    )
    return _scalar(out if log else np.exp(out))


def weissvm_conditional_circular(p: WeiSSVMParams, x, theta, log=False):
    """Sine-skewed von Mises density of the angle given length ``x``.

    The concentration is ``(beta x)^alpha tanh(kappa)``.
    """
    x = _lengths(x)
    conc = (p.beta * x) ** p.alpha * math.tanh(p.kappa)
    phi = np.asarray(theta, dtype=float) - p.mu
    out = _log_skew(p.lam, phi) + conc * np.cos(phi) - LOG_2PI - log_bessel_i(0, conc)
    return _scalar(out if log else np.exp(out))


def conditional_linear_rate(p: WeiSSVMParams, theta):
    """Rate of the Weibull law of ``x`` given the angle (multiplies ``x``, shape ``alpha``)."""
    phi = np.asarray(theta, dtype=float) - p.mu
    return p.beta * (1.0 - math.tanh(p.kappa) * np.cos(phi)) ** (1.0 / p.alpha)


def weissvm_conditional_linear(p: WeiSSVMParams, theta, x, log=False):
    out = weibull_logpdf(x, p.alpha, conditional_linear_rate(p, theta))
    return _scalar(out if log else np.exp(out))


def ggssvm_log_norm_const(p: GGSSVMParams) -> float:
    """``log C`` with ``C = gamma beta^alpha / (2 pi cosh(kappa)^(alpha/gamma) Q(alpha/gamma - 1, 0, cosh kappa))``."""
    ratio = p.alpha / p.gamma
    q = legendre_q(ratio - 1.0, 0, math.cosh(p.kappa))
    return (
        math.log(p.gamma)
        + p.alpha * math.log(p.beta)
        - LOG_2PI
        - ratio * log_cosh(p.kappa)
        - math.log(q)
    )


def ggssvm_logpdf(p: GGSSVMParams, theta, x, log_norm=None):
    x = _lengths(x)
    if log_norm is None:
        log_norm = ggssvm_log_norm_const(p)
    phi = np.asarray(theta, dtype=float) - p.mu
    with np.errstate(divide="ignore"):
        out = (
            log_norm
            + _log_skew(p.lam, phi)
            + special.xlogy(p.alpha - 1.0, x)
            - (p.beta * x) ** p.gamma * (1.0 - math.tanh(p.kappa) * np.cos(phi))
        )
    return _scalar(out)


def jw_logpdf(p: JWParams, theta, x):
    x = _lengths(x)
    phi = np.asarray(theta, dtype=float) - p.mu
    out = (
        math.log(p.beta)
        - LOG_2PI
        - log_cosh(p.kappa)
        - p.beta * x * (1.0 - math.tanh(p.kappa) * np.cos(phi))
    )
    return _scalar(out)


def indep_logpdf(p: IndepParams, theta, x):
    phi = np.asarray(theta, dtype=float) - p.mu
    out = weibull_logpdf(x, p.alpha, p.beta) + _log_skew(p.lam, phi) - LOG_2PI
    return _scalar(out)


def ks_log_norm_const(p: MSKSParams, truncation_tol: float = 1e-13, max_terms: int = 10_000) -> float:
    """Log of the Kato-Shimizu normalizing constant from its Bessel series.

    Scaled Bessel functions keep the series O(1); summation stops once three
    consecutive terms fall below ``truncation_tol`` times the running sum.
    """
    if not truncation_tol > 0:
        raise ValueError("truncation_tol must be positive")
    k1, k2 = p.kappa1, p.kappa2
    delta = p.mu1 - p.mu2
    total = special.ive(0, k1) * special.ive(0, k2)
    small = 0
    for j in range(1, max_terms + 1):
        term = 2.0 * special.ive(j, k2) * special.ive(2 * j, k1) * math.cos(2 * j * delta)
        total += term
        small = small + 1 if abs(term) < truncation_tol * abs(total) else 0
        if small >= 3:
            break
    else:
        raise SeriesError(f"normalizing series did not converge in {max_terms} terms")
    return -(1.5 * LOG_2PI + math.log(p.sigma) + k1 + k2 + math.log(total))


def ks_norm_const(p: MSKSParams, truncation_tol: float = 1e-13) -> float:
    return math.exp(ks_log_norm_const(p, truncation_tol))


def ms_ks_logpdf(p: MSKSParams, theta, x, truncation_tol: float = 1e-13, log_norm=None):
    """Kato-Shimizu log density on the real line times the circle."""
    if log_norm is None:
        log_norm = ks_log_norm_const(p, truncation_tol)
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    mean = p.mu_prime + p.lam * np.cos(theta - p.nu)
    out = (
        log_norm
        - (x - mean) ** 2 / (2.0 * p.sigma**2)
        + p.kappa1 * np.cos(theta - p.mu1)
        + p.kappa2 * np.cos(2.0 * (theta - p.mu2))
    )
    return _scalar(out)
