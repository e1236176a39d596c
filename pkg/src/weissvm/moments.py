"""Analytic moments and circular-linear correlation of the WeiSSVM.

The mixed moments are derived with the angle measured from ``mu``; the
``centered`` results below are therefore moments of ``Theta - mu``.  Absolute
moments of ``Theta`` are obtained by rotating the centered ones.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .models import WeiSSVMParams, log_cosh
from .specfun import legendre_q

__all__ = [
    "UndefinedCorrelationError",
    "NamedMoments",
    "Covariances",
    "Correlations",
    "mixed_moment_cos",
    "mixed_moment_sin",
    "named_moments",
    "covariances",
    "correlations",
    "circular_linear_correlation",
    "r_squared_from_correlations",
    "sample_circular_linear_correlation",
]


class UndefinedCorrelationError(ValueError):
    """A variance entering a correlation is zero (or not positive numerically)."""


def _check_order(n, m):
    for name, v in (("n", n), ("m", m)):
        if int(v) != v or v < 0:
            raise ValueError(f"moment order {name} must be a nonnegative integer")
    return int(n), int(m)


def _radial_factor(p: WeiSSVMParams, n: int) -> float:
    # cosh(kappa)^(n/alpha) / beta^n, in logs so large kappa stays finite longer
    return math.exp(n / p.alpha * log_cosh(p.kappa) - n * math.log(p.beta))


def mixed_moment_cos(p: WeiSSVMParams, n: int, m: int) -> float:
    """``E[X^n cos(m (Theta - mu))]``."""
    n, m = _check_order(n, m)
    if n == 0 and m == 0:
        return 1.0
    nu = n / p.alpha
    return _radial_factor(p, n) * legendre_q(nu, m, math.cosh(p.kappa))


def mixed_moment_sin(p: WeiSSVMParams, n: int, m: int) -> float:
    """``E[X^n sin(m (Theta - mu))]``; only the skewness term survives the angular integral."""
    n, m = _check_order(n, m)
    if m == 0:
        raise ValueError("sine moments need m >= 1 (the m = 0 moment is identically zero)")
    if p.lam == 0.0:
        return 0.0
    nu = n / p.alpha
    z = math.cosh(p.kappa)
    diff = legendre_q(nu, m - 1, z) - legendre_q(nu, m + 1, z)
    return 0.5 * p.lam * _radial_factor(p, n) * diff


@dataclass(frozen=True)
class NamedMoments:
    ex: float
    ex2: float
    ecos: float
    ecos2: float
    esin: float
    esin2: float
    excos: float
    exsin: float
    ecossin: float

    def as_dict(self):
        return asdict(self)


def named_moments(p: WeiSSVMParams, centered: bool = False) -> NamedMoments:
    """The nine standard moments of ``(X, Theta)``.

    With ``centered=True`` the trigonometric moments are those of
    ``Theta - mu``; otherwise they refer to the absolute angle.
    """
    c1 = mixed_moment_cos(p, 0, 1)
    s1 = mixed_moment_sin(p, 0, 1)
    c2 = mixed_moment_cos(p, 0, 2)
    s2 = mixed_moment_sin(p, 0, 2)
    xc = mixed_moment_cos(p, 1, 1)
    xs = mixed_moment_sin(p, 1, 1)
    ex = mixed_moment_cos(p, 1, 0)
    ex2 = mixed_moment_cos(p, 2, 0)
    if centered:
        cm, sm, c2m, s2m = 1.0, 0.0, 1.0, 0.0
    else:
        cm, sm = math.cos(p.mu), math.sin(p.mu)
        c2m, s2m = math.cos(2.0 * p.mu), math.sin(2.0 * p.mu)
    ecos2t = c2 * c2m - s2 * s2m
    esin2t = s2 * c2m + c2 * s2m
    return NamedMoments(
        ex=ex,
        ex2=ex2,
        ecos=c1 * cm - s1 * sm,
        ecos2=0.5 * (1.0 + ecos2t),
        esin=s1 * cm + c1 * sm,
        esin2=0.5 * (1.0 - ecos2t),
        excos=xc * cm - xs * sm,
        exsin=xs * cm + xc * sm,
        ecossin=0.5 * esin2t,
    )


@dataclass(frozen=True)
class Covariances:
    var_x: float
    var_cos: float
    var_sin: float
    cov_xc: float
    cov_xs: float
    cov_cs: float

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Correlations:
    r_xc: float
    r_xs: float
    r_cs: float

    def as_dict(self):
        return asdict(self)


def covariances(p: WeiSSVMParams) -> Covariances:
    """Variances and covariances of ``(X, cos(Theta - mu), sin(Theta - mu))``."""
    m = named_moments(p, centered=True)
    return Covariances(
        var_x=m.ex2 - m.ex**2,
        var_cos=m.ecos2 - m.ecos**2,
        var_sin=m.esin2 - m.esin**2,
        cov_xc=m.excos - m.ex * m.ecos,
        cov_xs=m.exsin - m.ex * m.esin,
        cov_cs=m.ecossin - m.ecos * m.esin,
    )


def _corr(cov, v1, v2):
    if not (v1 > 0 and v2 > 0):
        raise UndefinedCorrelationError("correlation undefined: zero variance")
    return cov / math.sqrt(v1 * v2)


def correlations(p: WeiSSVMParams) -> Correlations:
    """Pairwise correlations of ``X``, ``cos(Theta - mu)`` and ``sin(Theta - mu)``."""
    c = covariances(p)
    return Correlations(
        r_xc=_corr(c.cov_xc, c.var_x, c.var_cos),
        r_xs=_corr(c.cov_xs, c.var_x, c.var_sin),
        r_cs=_corr(c.cov_cs, c.var_cos, c.var_sin),
    )


def r_squared_from_correlations(r_xc, r_xs, r_cs):
    denom = 1.0 - r_cs**2
    if not denom > 0:
        raise UndefinedCorrelationError("cos and sin components are perfectly correlated")
    return (r_xc**2 + r_xs**2 - 2.0 * r_cs * r_xc * r_xs) / denom


def circular_linear_correlation(p: WeiSSVMParams) -> float:
    """Squared circular-linear correlation ``R^2`` between ``X`` and ``Theta``."""
    r = correlations(p)
    return r_squared_from_correlations(r.r_xc, r.r_xs, r.r_cs)


def sample_circular_linear_correlation(theta, x) -> float:
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    if theta.shape != x.shape or theta.ndim != 1:
        raise ValueError("theta and x must be 1-D arrays of equal length")
    if theta.size < 4:
        raise ValueError("need at least 4 observations")
    cols = np.vstack([x, np.cos(theta), np.sin(theta)])
    sd = cols.std(axis=1)
    if np.any(sd <= 1e-12 * np.maximum(1.0, np.abs(cols).max(axis=1))):
        raise UndefinedCorrelationError("degenerate sample: a component has zero variance")
    r = np.corrcoef(cols)
    return float(r_squared_from_correlations(r[0, 1], r[0, 2], r[1, 2]))
