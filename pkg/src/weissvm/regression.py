"""Conditional moments of the WeiSSVM for regression.

``x`` given the angle is Weibull, so its mean and variance are closed form.
The angle given ``x`` is sine-skewed von Mises with concentration
``c = (beta x)^alpha tanh(kappa)``.  Its first trigonometric moment about
``mu`` is ``I1(c) / (c I0(c)) * (c + i lam)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .models import WeiSSVMParams, wrap_angle

__all__ = [
    "UndefinedDirectionError",
    "cond_mean_x",
    "cond_var_x",
    "cond_mean_direction",
    "cond_mean_resultant",
    "conditional_concentration",
]


class UndefinedDirectionError(ValueError):
    """The conditional mean resultant is zero, so no mean direction exists."""


def _shrink(theta, p: WeiSSVMParams):
    return 1.0 - math.tanh(p.kappa) * np.cos(np.asarray(theta, dtype=float) - p.mu)


def _out(v):
    v = np.asarray(v, dtype=float)
    return v if v.ndim else float(v)


def cond_mean_x(p: WeiSSVMParams, theta):
    return _out(special.gamma(1.0 / p.alpha + 1.0) / (p.beta * _shrink(theta, p) ** (1.0 / p.alpha)))


def cond_var_x(p: WeiSSVMParams, theta):
    g1 = special.gamma(1.0 / p.alpha + 1.0)
    g2 = special.gamma(2.0 / p.alpha + 1.0)
    return _out((g2 - g1 * g1) / (p.beta**2 * _shrink(theta, p) ** (2.0 / p.alpha)))


def conditional_concentration(p: WeiSSVMParams, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("lengths must be nonnegative")
    return (p.beta * x) ** p.alpha * math.tanh(p.kappa)


def _bessel_ratio_over_c(c):
    """``I1(c) / (c I0(c))`` with its limit 1/2 at ``c = 0``."""
    c = np.asarray(c, dtype=float)
    small = c < 1e-6
    safe = np.where(small, 1.0, c)
    exact = special.ive(1, safe) / (safe * special.ive(0, safe))
    return np.where(small, 0.5 - c * c / 16.0, exact)


def cond_mean_direction(p: WeiSSVMParams, x):
    """Mean direction of the angle given ``x``: ``mu + arg(c + i lam)``, wrapped."""
    c = conditional_concentration(p, x)
    if p.lam == 0.0 and np.any(c == 0.0):
        raise UndefinedDirectionError("zero mean resultant: direction undefined (kappa * x = 0 and lam = 0)")
    return _out(wrap_angle(p.mu + np.arctan2(p.lam, c)))


def cond_mean_resultant(p: WeiSSVMParams, x):
    c = conditional_concentration(p, x)
    return _out(_bessel_ratio_over_c(c) * np.hypot(c, p.lam))
