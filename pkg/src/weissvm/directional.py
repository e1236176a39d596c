"""Weibull sine-skewed Fisher-von Mises-Langevin law on the sphere times the half line.

Directions are unit vectors in ``R^k``; ``k = 2`` recovers the planar WeiSSVM.
Only the density and its normalizing constant are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .models import log_cosh
from .specfun import legendre_neg_order

__all__ = [
    "CollinearError",
    "SphereParams",
    "sign_vector",
    "weissfvml_log_norm_const",
    "weissfvml_norm_const",
    "weissfvml_logpdf",
]

_UNIT_TOL = 1e-12


class CollinearError(ValueError):
    """The direction is parallel to the location, so the sign vector is undefined."""


def _unit(name, v, tol=_UNIT_TOL):
    v = np.array(v, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector")
    if not np.all(np.isfinite(v)) or abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{name} must be a unit vector")
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class SphereParams:
    """Parameters of the spherical-linear model; ``lambda_vec`` must be a unit vector too."""

    k: int
    mu: np.ndarray = field(repr=True)
    lambda_vec: np.ndarray = field(repr=True)
    alpha: float = 1.0
    beta: float = 1.0
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise ValueError("k must be an integer >= 2")
        object.__setattr__(self, "k", int(self.k))
        mu = _unit("mu", self.mu)
        lam = _unit("lambda_vec", self.lambda_vec)
        if mu.size != self.k or lam.size != self.k:
            raise ValueError("mu and lambda_vec must have length k")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "lambda_vec", lam)
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive")
            object.__setattr__(self, name, v)
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise ValueError("kappa must be nonnegative")
        object.__setattr__(self, "kappa", float(self.kappa))


def sign_vector(theta_vec, mu):
    """Unit tangent at ``mu`` pointing toward ``theta_vec``."""
    theta_vec = np.asarray(theta_vec, dtype=float)
    mu = np.asarray(mu, dtype=float)
    proj = theta_vec - np.dot(theta_vec, mu) * mu
    nrm = np.linalg.norm(proj)
    if nrm <= 1e-12:
        raise CollinearError("theta is collinear with mu")
    return proj / nrm


def weissfvml_log_norm_const(p: SphereParams) -> float:
    """``log C_k``; ``kappa = 0`` uses the uniform-sphere limit."""
    k = p.k
    base = math.log(p.alpha) + p.alpha * math.log(p.beta)
    if p.kappa == 0.0:
        return base + special.gammaln(0.5 * k) - math.log(2.0) - 0.5 * k * math.log(math.pi)
    legendre = legendre_neg_order(0.5 * k - 1.0, 0.5 * k - 2.0, math.cosh(p.kappa))
    return (
        base
        + (0.5 * k - 1.0) * math.log(math.sinh(p.kappa))
        - 0.5 * k * math.log(2.0 * math.pi)
        - log_cosh(p.kappa)
        - math.log(legendre)
    )


def weissfvml_norm_const(p: SphereParams) -> float:
    return math.exp(weissfvml_log_norm_const(p))


def weissfvml_logpdf(p: SphereParams, theta_vec, x, unit_tol: float = 1e-9):
    """Log density at direction(s) ``theta_vec`` (shape ``(k,)`` or ``(N, k)``) and length(s) ``x``."""
    theta = np.asarray(theta_vec, dtype=float)
    if theta.shape[-1] != p.k:
        raise ValueError("theta_vec has the wrong dimension")
    if np.any(np.abs(np.linalg.norm(theta, axis=-1) - 1.0) > unit_tol):
        raise ValueError("theta_vec must have unit norm")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("lengths must be nonnegative")
    t = theta @ p.mu
    tangent = theta - t[..., None] * p.mu if theta.ndim > 1 else theta - t * p.mu
    # sqrt(1 - t^2) * lambda'S(theta) == lambda'(theta - t mu); zero on the axis
    skew = 1.0 + tangent @ p.lambda_vec
    with np.errstate(divide="ignore"):
        log_skew = np.where(skew > 0, np.log(np.where(skew > 0, skew, 1.0)), -np.inf)
        out = (
            weissfvml_log_norm_const(p)
            + log_skew
            + special.xlogy(p.alpha - 1.0, x)
            - (p.beta * x) ** p.alpha * (1.0 - math.tanh(p.kappa) * t)
        )
    out = np.asarray(out)
    return out if out.ndim else float(out)
