"""Exact random variate generation for the WeiSSVM.

Draws follow the circular-marginal / linear-conditional factorization:

1. a wrapped Cauchy angle with location ``mu`` and ``rho = tanh(kappa/2)``,
2. sine-skewing by keeping it or reflecting it about ``mu``,
3. a Weibull length with shape ``alpha`` and the angle-dependent rate.

Random sources are always passed in explicitly; anything accepted by
:func:`numpy.random.default_rng` works (a seed, a ``SeedSequence`` or a
``Generator``).
"""

from __future__ import annotations

import math

import numpy as np

from .models import WeiSSVMParams, conditional_linear_rate, wrap_angle

__all__ = [
    "as_generator",
    "sample_wrapped_cauchy",
    "sine_skew_accept",
    "weibull_inverse_transform",
    "sample_weibull_scaled",
    "sample_weissvm",
]


def as_generator(src=None) -> np.random.Generator:
    return src if isinstance(src, np.random.Generator) else np.random.default_rng(src)


def _uniform(rng, size):
    # (0, 1]: keeps -log(u) finite
    return 1.0 - rng.random(size)


def sample_wrapped_cauchy(mu, rho, src=None, size=None):
    """Wrapped Cauchy draws in ``[-pi, pi)`` with mean resultant length ``rho``."""
    if not 0.0 <= rho < 1.0:
        raise ValueError("rho must lie in [0, 1)")
    rng = as_generator(src)
    u = rng.random(size)
    if rho == 0.0:
        return wrap_angle(2.0 * math.pi * u - math.pi)
    scale = -math.log(rho)
    return wrap_angle(mu + scale * np.tan(math.pi * (u - 0.5)))


def sine_skew_accept(theta1, mu, lam, u):
    """Keep ``theta1`` with probability ``(1 + lam sin(theta1 - mu))/2``, else reflect it about ``mu``."""
    if not -1.0 <= lam <= 1.0:
        raise ValueError("lam must lie in [-1, 1]")
    theta1 = np.asarray(theta1, dtype=float)
    keep = np.asarray(u) < 0.5 * (1.0 + lam * np.sin(theta1 - mu))
    return wrap_angle(np.where(keep, theta1, 2.0 * mu - theta1))


def weibull_inverse_transform(u, alpha, rate):
    """``(-log u)^(1/alpha) / rate``: maps uniforms on (0, 1] to Weibull lengths."""
    return (-np.log(u)) ** (1.0 / alpha) / rate


def sample_weibull_scaled(alpha, rate, src=None, size=None):
    if not (alpha > 0 and np.all(np.asarray(rate) > 0)):
        raise ValueError("alpha and rate must be positive")
    rng = as_generator(src)
    return weibull_inverse_transform(_uniform(rng, size), alpha, rate)


def sample_weissvm(p: WeiSSVMParams, n: int, src=None):
    """Draw ``n`` pairs; returns ``(theta, x)`` arrays."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    rng = as_generator(src)
    theta1 = sample_wrapped_cauchy(p.mu, math.tanh(0.5 * p.kappa), rng, size=n)
    theta = sine_skew_accept(theta1, p.mu, p.lam, rng.random(n))
    x = sample_weibull_scaled(p.alpha, conditional_linear_rate(p, theta), rng, size=n)
    return np.asarray(theta), np.asarray(x)
