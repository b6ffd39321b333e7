"""Memoryless threshold strategies and their exact expected final rank.

A memoryless strategy is a vector phi with phi[n-1] = 1: accept the first
observation X_j <= phi_j, ignoring all history.  The expected final rank
has a closed form.  Acceptance at index j happens with probability
phi_j * prod_{l<j}(1 - phi_l), the accepted value is uniform on
[0, phi_j], each passed earlier value is uniform on (phi_l, 1], and each
of the n - j later values undercuts x with probability x.  Integrating
the conditional rank over x gives, per index j,

    term_j = pre_j * ( phi_j * (1 + (n-j) * phi_j / 2) + S_j / 2 )

with pre_j the probability of reaching index j and
S_j = sum_{l<j} max(0, phi_j - phi_l)^2 / (1 - phi_l).  For nondecreasing
vectors (the one-parameter family below always is) the clamp is inactive
and S reduces to prefix sums, making the evaluation O(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import core


@dataclass(frozen=True)
class ThresholdVector:
    """Memoryless strategy: accept the first X_j <= phi[j-1]."""

    n: int
    phi: np.ndarray

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=np.float64)
        object.__setattr__(self, "phi", phi)
        if self.n < 1 or phi.shape != (self.n,):
            raise ValueError("phi must have length n >= 1")
        if np.any(phi <= 0.0) or np.any(phi > 1.0):
            raise ValueError("thresholds must lie in (0, 1]")
        if phi[-1] != 1.0:
            raise ValueError("phi[n-1] must be 1 to force acceptance")

    def decide(self, k: int, x: float, history: Sequence[float], n: int) -> bool:
        return x <= self.phi[k - 1]

    def simulation_plan(self, n: int):
        if n != self.n:
            raise ValueError(f"threshold vector is for n={self.n}, not n={n}")
        return ("threshold", self.phi)


@dataclass(frozen=True)
class CFamilySpec:
    """One-parameter threshold family phi_j = c / (n - j + c), c > 1."""

    c: float
    n: int

    def __post_init__(self):
        if self.c <= 1.0:
            raise ValueError("family parameter c must exceed 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")


def phi_family(spec: CFamilySpec) -> ThresholdVector:
    j = np.arange(1, spec.n + 1, dtype=np.float64)
    phi = spec.c / (spec.n - j + spec.c)
    phi[-1] = 1.0
    return ThresholdVector(n=spec.n, phi=phi)


def expected_rank_exact(tv: ThresholdVector) -> float:
    phi = tv.phi
    n = tv.n
    q = 1.0 - phi
    pre = np.empty(n)
    pre[0] = 1.0
    if n > 1:
        np.cumprod(q[:-1], out=pre[1:])
    # a threshold of exactly 1 before the end zeroes every later reach
    # probability; drop its 1/(1-phi) weight rather than divide by zero.
    inv = np.where(q > 0.0, 1.0 / np.where(q > 0.0, q, 1.0), 0.0)
    if n == 1:
        return 1.0
    if np.all(np.diff(phi) >= 0.0):
        a = np.concatenate(([0.0], np.cumsum(inv)[:-1]))
        b = np.concatenate(([0.0], np.cumsum(phi * inv)[:-1]))
        c = np.concatenate(([0.0], np.cumsum(phi * phi * inv)[:-1]))
        s = phi * phi * a - 2.0 * phi * b + c
    else:
        s = np.empty(n)
        for j in range(n):
            d = phi[j] - phi[:j]
            np.clip(d, 0.0, None, out=d)
            s[j] = float((d * d * inv[:j]).sum())
    jj = np.arange(1, n + 1, dtype=np.float64)
    terms = pre * (phi * (1.0 + (n - jj) * phi / 2.0) + s / 2.0)
    return float(math.fsum(terms))


@dataclass(frozen=True)
class COptResult:
    c_star: float
    value: float
    n: int
    unimodal: bool


@dataclass(frozen=True)
class FreeOptResult:
    vector: ThresholdVector
    value: float
    converged: bool
    sweeps: int


def _family_value(c: float, n: int) -> float:
    return expected_rank_exact(phi_family(CFamilySpec(c=c, n=n)))


def optimize_c(
    n: int, search_interval: tuple[float, float] = (1.05, 8.0)
) -> COptResult:
    """Minimise the family's exact expected rank over c.

    A coarse scan locates the basin (and checks unimodality); Brent then
    refines to 1e-5 in c.  If the scan is not V-shaped the dense-grid
    minimum still seeds the refinement, flagged via ``unimodal=False``.
    """
    lo, hi = search_interval
    if not (1.0 < lo < hi):
        raise ValueError("search interval must satisfy 1 < lo < hi")
    if n == 1:
        return COptResult(c_star=lo, value=1.0, n=1, unimodal=True)
    cs = np.linspace(lo, hi, 33)
    vals = np.array([_family_value(c, n) for c in cs])
    sign = np.sign(np.diff(vals))
    sign = sign[sign != 0]
    unimodal = bool(np.all(np.diff(sign) >= 0))
    if not unimodal:
        cs = np.linspace(lo, hi, 400)
        vals = np.array([_family_value(c, n) for c in cs])
    i = int(np.argmin(vals))
    left = cs[max(0, i - 1)]
    right = cs[min(len(cs) - 1, i + 1)]
    res = minimize_scalar(
        _family_value,
        bounds=(left, right),
        args=(n,),
        method="bounded",
        options={"xatol": 1e-5},
    )
    return COptResult(
        c_star=float(res.x), value=float(res.fun), n=n, unimodal=unimodal
    )


def optimize_free(
    n: int, value_tol: float = 1e-5, max_sweeps: int = 200
) -> FreeOptResult:
    """Cyclic coordinate descent over all n-1 free thresholds.

    Capped at n <= 20: each sweep costs O(n^2) evaluations of an O(n^2)
    objective, which is the documented desk-scale budget.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 20:
        raise ValueError("optimize_free supports n <= 20 (documented budget cap)")
    if n == 1:
        return FreeOptResult(
            vector=ThresholdVector(n=1, phi=np.array([1.0])),
            value=1.0,
            converged=True,
            sweeps=0,
        )
    start = min(4.0, 1.0 + n / 2.0)
    phi = phi_family(CFamilySpec(c=min(1.9469, start), n=n)).phi.copy()
    value = expected_rank_exact(ThresholdVector(n=n, phi=phi))
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for i in range(n - 1):

            def coord(v: float, i: int = i) -> float:
                trial = phi.copy()
                trial[i] = v
                return expected_rank_exact(ThresholdVector(n=n, phi=trial))

            res = minimize_scalar(
                coord, bounds=(1e-9, 1.0), method="bounded", options={"xatol": 1e-8}
            )
            if res.fun < coord(float(phi[i])):
                phi[i] = float(res.x)
        new_value = expected_rank_exact(ThresholdVector(n=n, phi=phi))
        if value - new_value < value_tol / 10.0:
            value = new_value
            converged = True
            break
        value = new_value
    return FreeOptResult(
        vector=ThresholdVector(n=n, phi=phi),
        value=value,
        converged=converged,
        sweeps=sweeps,
    )
