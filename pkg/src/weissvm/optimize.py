"""Derivative-free Nelder-Mead maximization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["NelderMeadConfig", "NelderMeadResult", "nelder_mead"]


@dataclass(frozen=True)
class NelderMeadConfig:
    reflect: float = 1.0
    expand: float = 2.0
    contract: float = 0.5
    shrink: float = 0.5
    value_tol: float = 1e-10
    size_tol: float = 1e-9
    max_iter: int = 5000
    restarts: int = 1
    initial_step: float = 0.1


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    spread: float


def _initial_simplex(x0, step):
    n = x0.size
    simplex = np.repeat(x0[None, :], n + 1, axis=0)
    for i in range(n):
        simplex[i + 1, i] += step * max(1.0, abs(x0[i]))
    return simplex


def _minimize(fun, x0, cfg: NelderMeadConfig):
    simplex = _initial_simplex(x0, cfg.initial_step)
    values = np.array([fun(v) for v in simplex])
    n = x0.size
    it = 0
    converged = False
    while it < cfg.max_iter:
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        value_spread = values[-1] - values[0]
        size_spread = np.max(np.abs(simplex[1:] - simplex[0]))
        if np.isfinite(value_spread) and value_spread < cfg.value_tol and size_spread < cfg.size_tol:
            converged = True
            break
        it += 1
        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + cfg.reflect * (centroid - worst)
        fr = fun(xr)
        if fr < values[0]:
            xe = centroid + cfg.expand * (xr - centroid)
            fe = fun(xe)
            if fe < fr:
                simplex[-1], values[-1] = xe, fe
            else:
                simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-2]:
            simplex[-1], values[-1] = xr, fr
            continue
        if fr < values[-1]:
            xc = centroid + cfg.contract * (xr - centroid)
            fc = fun(xc)
            if fc <= fr:
                simplex[-1], values[-1] = xc, fc
                continue
        else:
            xc = centroid + cfg.contract * (worst - centroid)
            fc = fun(xc)
            if fc < values[-1]:
                simplex[-1], values[-1] = xc, fc
                continue
        best = simplex[0]
        simplex[1:] = best + cfg.shrink * (simplex[1:] - best)
        values[1:] = [fun(v) for v in simplex[1:]]
    order = np.argsort(values, kind="stable")
    simplex, values = simplex[order], values[order]
    spread = float(np.max(np.abs(simplex[1:] - simplex[0]))) if n else 0.0
    return simplex[0].copy(), float(values[0]), it, converged, spread


def nelder_mead(objective, initial, config: NelderMeadConfig | None = None) -> NelderMeadResult:
    """Maximize ``objective`` starting from ``initial``.

    Convergence is declared when the simplex values span less than
    ``value_tol`` and all vertices lie within ``size_tol`` of the best one.  A
    converged run is restarted ``config.restarts`` times from its best vertex
    with a fresh simplex, which guards against collapse onto a flat ridge.
    Hitting ``max_iter`` in any run yields ``converged=False``.
    """
    cfg = config or NelderMeadConfig()
    x0 = np.atleast_1d(np.asarray(initial, dtype=float)).copy()
    start_value = objective(x0)
    if not math.isfinite(start_value):
        raise ValueError("objective is not finite at the initial point")

    def fun(v):
        val = objective(v)
        # maximization -> minimization; NaN and -inf are treated as infeasible
        return -val if not math.isnan(val) else math.inf

    total_it = 0
    x, fval, it, converged, spread = _minimize(fun, x0, cfg)
    total_it += it
    for _ in range(cfg.restarts):
        if not converged:
            break
        x, fval, it, converged, spread = _minimize(fun, x, cfg)
        total_it += it
    return NelderMeadResult(x=x, value=-fval, iterations=total_it, converged=converged, spread=spread)
