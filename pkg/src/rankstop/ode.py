"""Horizon-evolution equation for the embedded stopping value.

The value w(t) of the continuous-time problem with horizon t satisfies

    w'(t) + w(t) = int_0^1 min(1 + x t, w(t) + h(t, x)) dx,

where h(t, x) is the conditional-value gap of an unacceptable value x
planted at time 0 (h -> 0 as t -> infinity) and w(0) equals the penalty
at horizon zero.  The left branch of the min is the cost of accepting a
first value x immediately (its rank grows by the x-fraction of later
arrivals); the right branch is the cost of passing it.

The right-hand side is integrated exactly: the branch-crossing point is
the root of a linear equation on each x-cell where h is linear (tables)
or constant (none), and bracketed numerically for callable h.  The time
march itself uses an embedded adaptive Runge-Kutta pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .poisson import HTable, default_penalty


@dataclass(frozen=True)
class OdeProblem:
    t_max: float
    h_model: HTable | Callable[[float, np.ndarray], np.ndarray] | None = None
    penalty: Callable[[float], float] = default_penalty
    first_step: float = 1e-3
    rtol: float = 1e-6
    atol: float = 1e-8

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")


@dataclass
class OdeResult:
    t: np.ndarray
    w: np.ndarray
    limit_estimate: float
    error_estimate: float
    steady_state: float
    diagnostics: dict = field(default_factory=dict)


def _seg_min_linear(x0: float, x1: float, a0: float, a1: float, b0: float, b1: float) -> float:
    """Integral of min(a0 + a1 x, b0 + b1 x) over [x0, x1]."""

    def piece(u: float, v: float, c0: float, c1: float) -> float:
        return c0 * (v - u) + c1 * (v * v - u * u) / 2.0

    if x1 <= x0:
        return 0.0
    if a1 == b1:
        return piece(x0, x1, a0, a1) if a0 <= b0 else piece(x0, x1, b0, b1)
    xs = (b0 - a0) / (a1 - b1)
    if xs <= x0 or xs >= x1:
        mid = 0.5 * (x0 + x1)
        if a0 + a1 * mid <= b0 + b1 * mid:
            return piece(x0, x1, a0, a1)
        return piece(x0, x1, b0, b1)
    if a0 + a1 * x0 <= b0 + b1 * x0:
        return piece(x0, xs, a0, a1) + piece(xs, x1, b0, b1)
    return piece(x0, xs, b0, b1) + piece(xs, x1, a0, a1)


def rhs_integral(t: float, w: float, h_model) -> float:
    """Exact or bracketed evaluation of int_0^1 min(1 + x t, w + h)."""
    if h_model is None:
        k = w
        if t <= 0.0:
            return min(1.0, k)
        if k <= 1.0:
            return k
        if k >= 1.0 + t:
            return 1.0 + t / 2.0
        xs = (k - 1.0) / t
        return xs + t * xs * xs / 2.0 + (1.0 - xs) * k
    if isinstance(h_model, HTable):
        xs = h_model.grid_x
        hv = h_model(t, xs)
        if not np.all(np.isfinite(hv)):
            raise ValueError("h model returned non-finite values")
        total = 0.0
        grid = np.concatenate(([0.0], xs, [1.0]))
        hgrid = np.concatenate(([hv[0]], hv, [hv[-1]]))
        for i in range(len(grid) - 1):
            x0, x1 = float(grid[i]), float(grid[i + 1])
            if x1 <= x0:
                continue
            h0, h1 = float(hgrid[i]), float(hgrid[i + 1])
            slope = (h1 - h0) / (x1 - x0)
            b0 = w + h0 - slope * x0
            total += _seg_min_linear(x0, x1, 1.0, t, b0, slope)
        return total

    def g(x: float) -> float:
        hx = float(h_model(t, np.asarray(x)))
        if not math.isfinite(hx):
            raise ValueError("h model returned non-finite values")
        return (1.0 + x * t) - (w + hx)

    probe = np.linspace(0.0, 1.0, 65)
    signs = np.array([g(float(x)) for x in probe])
    roots = []
    for i in range(len(probe) - 1):
        if signs[i] == 0.0:
            roots.append(float(probe[i]))
        elif signs[i] * signs[i + 1] < 0.0:
            roots.append(float(brentq(g, probe[i], probe[i + 1])))
    pts = sorted(set(roots))

    def integrand(x: float) -> float:
        return min(1.0 + x * t, w + float(h_model(t, np.asarray(x))))

    val, _ = quad(integrand, 0.0, 1.0, points=pts or None, limit=200)
    return val


def steady_state_value(t: float, h_model) -> float:
    """Root of w = rhs_integral(t, w) on the accepting branch (w >= 1)."""
    def f(w: float) -> float:
        return rhs_integral(t, w, h_model) - w

    lo, hi = 1.0, 1.0 + t
    if f(lo) <= 0.0:
        return 1.0
    for _ in range(80):
        if f(hi) < 0.0:
            break
        hi *= 2.0
    return float(brentq(f, lo, hi, xtol=1e-12))


def ode_solve(problem: OdeProblem) -> OdeResult:
    """March the horizon equation from w(0) = penalty(0).

    Returns the trajectory, a limit estimate (time average of w over the
    last 10 percent of the horizon), the stationary value of the
    right-hand side at t_max, and a step-control error estimate that
    dominates the change observed when both tolerances are halved.
    """
    w0 = problem.penalty(0.0)

    def rhs(t: float, y):
        return [rhs_integral(t, float(y[0]), problem.h_model) - float(y[0])]

    t_eval = np.linspace(0.0, problem.t_max, 2001)
    sol = solve_ivp(
        rhs,
        (0.0, problem.t_max),
        [w0],
        method="RK45",
        rtol=problem.rtol,
        atol=problem.atol,
        first_step=problem.first_step,
        t_eval=t_eval,
    )
    if sol.status != 0:
        raise ArithmeticError(f"integration stalled (stiffness?): {sol.message}")
    t = sol.t
    w = sol.y[0]
    tail = t >= 0.9 * problem.t_max
    limit = float(np.trapezoid(w[tail], t[tail]) / (t[tail][-1] - t[tail][0]))
    err = 50.0 * (problem.atol + problem.rtol * max(1.0, abs(limit)))
    return OdeResult(
        t=t,
        w=w,
        limit_estimate=limit,
        error_estimate=err,
        steady_state=steady_state_value(problem.t_max, problem.h_model),
        diagnostics={"nfev": int(sol.nfev), "w0": w0},
    )
