"""Special functions and 1-D quadrature.

Everything downstream that needs an associated Legendre function goes through
:func:`legendre_q`, which returns the product ``Gamma(nu - m + 1) * P^m_nu(z)``.
That product stays finite where the gamma factor alone has a pole, which is
exactly where several mixed-moment formulas would otherwise break down.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

__all__ = [
    "QuadratureConfig",
    "QuadratureError",
    "DEFAULT_QUADRATURE",
    "integrate",
    "bessel_i",
    "log_bessel_i",
    "log_gamma",
    "chi_square_sf",
    "legendre_q",
    "legendre_neg_order",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature ran out of subdivisions before meeting its tolerance."""

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if int(self.max_subdivisions) != self.max_subdivisions or self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be a positive integer")

    def tighter(self, factor: float) -> "QuadratureConfig":
        return QuadratureConfig(self.abs_tol / factor, self.rel_tol / factor, self.max_subdivisions)


DEFAULT_QUADRATURE = QuadratureConfig()


@lru_cache(maxsize=None)
def _gauss_pair(n_low: int = 10, n_high: int = 21):
    return np.polynomial.legendre.leggauss(n_low), np.polynomial.legendre.leggauss(n_high)


def _panel(f, a, b):
    (xl, wl), (xh, wh) = _gauss_pair()
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    hi = half * np.dot(wh, f(mid + half * xh))
    lo = half * np.dot(wl, f(mid + half * xl))
    return hi, abs(hi - lo)


def _finite_range(f, a, b):
    """Map (a, b) onto a finite interval; returns the new integrand and limits."""
    if math.isinf(a) and math.isinf(b):
        if a > 0 or b < 0:
            raise ValueError("invalid integration limits")

        def g(u):
            d = 1.0 - u * u
            return f(u / d) * (1.0 + u * u) / (d * d)

        return g, -1.0, 1.0
    if math.isinf(b):
        # x = a + u / (1 - u)
        def g(u):
            d = 1.0 - u
            return f(a + u / d) / (d * d)

        return g, 0.0, 1.0
    if math.isinf(a):
        def g(u):
            d = 1.0 - u
            return f(b - u / d) / (d * d)

        return g, 0.0, 1.0
    return f, a, b


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    config: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Globally adaptive Gauss-Legendre quadrature of ``f`` over ``(a, b)``.

    Each panel is integrated with a 21-point Gauss rule and its error estimated
    against the embedded-interval 10-point rule; the panel with the largest
    error is bisected until the summed error drops below
    ``max(abs_tol, rel_tol * |result|)``.  Infinite limits are mapped with
    ``x = a + u/(1-u)`` (or ``x = u/(1-u^2)`` for the whole real line).

    ``f`` must accept and return numpy arrays.  Raises
    :class:`QuadratureError` when ``config.max_subdivisions`` bisections do
    not suffice.
    """
    if math.isnan(a) or math.isnan(b):
        raise ValueError("integration limits must not be NaN")
    if not a < b:
        raise ValueError("integrate requires a < b")
    g, lo, hi = _finite_range(f, float(a), float(b))

    value, err = _panel(g, lo, hi)
    heap = [(-err, lo, hi, value)]
    total, total_err = value, err
    splits = 0
    while total_err > max(config.abs_tol, config.rel_tol * abs(total)):
        if not math.isfinite(total):
            raise QuadratureError("integrand is not finite on the range", total, total_err)
        if splits >= config.max_subdivisions:
            raise QuadratureError(
                f"no convergence after {splits} subdivisions "
                f"(estimate {total!r}, error {total_err:.3g})",
                total,
                total_err,
            )
        neg_err, p, q, v = heapq.heappop(heap)
        m = 0.5 * (p + q)
        v1, e1 = _panel(g, p, m)
        v2, e2 = _panel(g, m, q)
        heapq.heappush(heap, (-e1, p, m, v1))
        heapq.heappush(heap, (-e2, m, q, v2))
        splits += 1
        # re-sum rather than update incrementally to keep rounding from drifting
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)
    return float(total)


def _check_finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite argument")


def log_bessel_i(order, z):
    """``log I_order(z)`` evaluated through the exponentially scaled Bessel function."""
    order = np.asarray(order, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_finite(order, z)
    if np.any(z < 0) or np.any(order < 0):
        raise ValueError("bessel_i needs order >= 0 and z >= 0")
    with np.errstate(divide="ignore"):
        out = np.log(special.ive(order, z)) + z
    return out if out.ndim else float(out)


def bessel_i(order, z):
    """Modified Bessel function of the first kind, ``I_order(z)``, for ``z >= 0``."""
    order = np.asarray(order, dtype=float)
    z = np.asarray(z, dtype=float)
    _check_finite(order, z)
    if np.any(z < 0) or np.any(order < 0):
        raise ValueError("bessel_i needs order >= 0 and z >= 0")
    out = special.iv(order, z)
    return out if out.ndim else float(out)


def log_gamma(x):
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    if np.any(x <= 0):
        raise ValueError("log_gamma is only defined here for x > 0")
    out = special.gammaln(x)
    return out if out.ndim else float(out)


def chi_square_sf(x, dof):
    """Upper tail probability ``P(chi2_dof > x)``."""
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    if np.any(x < 0):
        raise ValueError("chi-square statistic must be nonnegative")
    if int(dof) != dof or dof < 1:
        raise ValueError("dof must be a positive integer")
    out = special.gammaincc(0.5 * dof, 0.5 * x)
    return out if out.ndim else float(out)


def _one_minus_cos_form(z, s, c, half_angle):
    """Stable ``z - s*c`` where ``c = cos(t)`` and ``s = sqrt(z^2 - 1)``.

    Uses ``z - s cos t = 2 z sin^2(t/2) + cos(t) / (z + s)`` which avoids the
    cancellation near ``t = 0`` for large ``z``.
    """
    return 2.0 * z * np.sin(half_angle) ** 2 + c / (z + s)


def legendre_q(nu: float, m: int, z: float, config: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """``Gamma(nu - m + 1) * P^m_nu(z)`` for ``z >= 1``.

    Computed as ``Gamma(nu+1)/pi * int_0^pi cos(m t) (z - sqrt(z^2-1) cos t)^-(nu+1) dt``,
    which is finite for every ``nu > -1`` and integer ``m >= 0``.
    """
    _check_finite(nu, z)
    if int(m) != m or m < 0:
        raise ValueError("order m must be a nonnegative integer")
    if z < 1:
        raise ValueError("legendre_q requires z >= 1")
    if nu <= -1:
        raise ValueError("legendre_q requires nu > -1")
    m = int(m)
    lg = special.gammaln(nu + 1.0)
    if z == 1.0:
        return math.exp(lg) if m == 0 else 0.0
    s = math.sqrt((z - 1.0) * (z + 1.0))
    power = -(nu + 1.0)

    def integrand(t):
        base = _one_minus_cos_form(z, s, np.cos(t), 0.5 * t)
        return np.cos(m * t) * np.exp(power * np.log(base) + lg)

    return integrate(integrand, 0.0, math.pi, config) / math.pi


def legendre_neg_order(
    order: float, nu: float, z: float, config: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """``P^{-order}_nu(z)`` for ``order > -1/2`` and ``z >= 1``.

    Uses ``(z^2-1)^(order/2) / (2^order sqrt(pi) Gamma(order+1/2))
    * int_{-1}^{1} (1-t^2)^(order-1/2) (z + t sqrt(z^2-1))^(nu-order) dt``.
    The substitution ``t = cos(phi)`` gives ``sin(phi)^(2 order)`` weights; for
    negative orders a further ``phi = (pi/2) s^p`` with ``p = 1/(1 + 2 order)``
    at each end removes the endpoint singularity.
    """
    _check_finite(order, nu, z)
    if order <= -0.5:
        raise ValueError("legendre_neg_order requires order > -1/2")
    if z < 1:
        raise ValueError("legendre_neg_order requires z >= 1")
    if z == 1.0:
        if order > 0:
            return 0.0
        if order == 0:
            return 1.0
        return math.inf
    s = math.sqrt((z - 1.0) * (z + 1.0))
    p = 1.0 / (1.0 + 2.0 * order) if order < 0 else 1.0
    s_pow = (1.0 + 2.0 * order) * p - 1.0
    expo = nu - order
    jac = p * (0.5 * math.pi) ** (1.0 + 2.0 * order)

    def integrand(u):
        psi = 0.5 * math.pi * u**p
        c = np.cos(psi)
        plus = z + s * c
        minus = _one_minus_cos_form(z, s, c, 0.5 * psi)
        shape = np.sinc(psi / math.pi) ** (2.0 * order)
        return jac * shape * u**s_pow * (np.exp(expo * np.log(plus)) + np.exp(expo * np.log(minus)))

    body = integrate(integrand, 0.0, 1.0, config)
    log_pref = (
        0.5 * order * math.log((z - 1.0) * (z + 1.0))
        - order * math.log(2.0)
        - 0.5 * math.log(math.pi)
        - special.gammaln(order + 0.5)
    )
    return math.exp(log_pref) * body
