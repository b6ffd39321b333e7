"""Exact solutions where exactness is feasible.

Three problems admit exact treatment at desk scale:

* the classical best-choice (secretary) rule, optimal for the objective
  "accept the overall best", solved by backward induction for any n;
* the fully history-dependent optimal expected rank v_n, computed by
  backward induction over continuation values with nested quadrature.
  The state at step k is the whole multiset of passed values, so the
  computation is an (n-1)-dimensional integral: supported for n <= 4;
* optimal expected truncated loss min(j, L), a valid lower bound for
  v_n.  Storage grows exponentially in the truncation level, so only
  j <= 2 is supported (j = 1 is constant, j = 2 collapses to a
  one-dimensional running-minimum state).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ResourceBoundError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)

#: best published value of the related full-information problem; every
#: exact value here must sit below this coarse ceiling.
RANK_CEILING_REFERENCE = 3.869

#: best published lower bound for the limiting optimal value, obtained
#: with truncation level 5. Level 5 is far beyond the desk-scale budget
#: (storage grows exponentially in the level), so this is carried as a
#: cited reference constant, never recomputed.
TRUNCATION_LOWER_REFERENCE = 1.908


@dataclass(frozen=True)
class SecretaryRule:
    """Cutoff rule: accept the first relative-rank-1 arrival from `cutoff` on."""

    n: int
    cutoff: int
    success_prob: float


@dataclass(frozen=True)
class ExactValue:
    n: int
    value: float
    method: str  # closed-form | quadrature | brute-force
    quadrature_error_bound: float


@dataclass(frozen=True)
class TruncationSpec:
    n: int
    level: int
    value: float


def secretary_success_prob(n: int, cutoff: int) -> Fraction:
    """Exact win probability of a cutoff rule, in rational arithmetic."""
    if not 1 <= cutoff <= n:
        raise ValueError("cutoff must be in 1..n")
    if cutoff == 1:
        return Fraction(1, n)
    s = sum((Fraction(1, j - 1) for j in range(cutoff, n + 1)), Fraction(0))
    return Fraction(cutoff - 1, n) * s


def secretary_rule(n: int) -> SecretaryRule:
    """Backward-induction optimum for the best-choice objective.

    Accept a candidate (relative rank 1) at stage j iff j/n is at least
    the value of continuing; ties accept, giving the smallest optimal
    cutoff.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    u_next = 0.0  # win probability playing optimally from stage j+1 on
    cutoff = n
    for j in range(n, 0, -1):
        if j / n >= u_next:
            cutoff = j
        u_next = (1.0 / j) * max(j / n, u_next) + (1.0 - 1.0 / j) * u_next
    return SecretaryRule(
        n=n, cutoff=cutoff, success_prob=float(secretary_success_prob(n, cutoff))
    )


def secretary_rule_sum_form(n: int) -> SecretaryRule:
    """Variant cutoff from the condition sum_{j=k}^{n} 1/j <= 1.

    Kept as a labelled alternative: at small n it stops later than the
    backward-induction optimum (e.g. cutoff 3 instead of 2 at n = 4), so
    it is exposed for comparison, never used as ground truth.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tail = Fraction(0)
    cutoff = n
    for k in range(n, 0, -1):
        tail += Fraction(1, k)
        if tail <= 1:
            cutoff = k
        else:
            break
    return SecretaryRule(
        n=n, cutoff=cutoff, success_prob=float(secretary_success_prob(n, cutoff))
    )


def _int_min_linear(lo: float, hi: float, a0: float, a1: float, b0: float, b1: float) -> float:
    """Integral of min(a0 + a1*y, b0 + b1*y) over [lo, hi]."""

    def seg(u: float, v: float, c0: float, c1: float) -> float:
        return c0 * (v - u) + c1 * (v * v - u * u) / 2.0

    if hi <= lo:
        return 0.0
    da, db = a0 + a1 * lo, b0 + b1 * lo
    if a1 == b1:
        return seg(lo, hi, a0, a1) if da <= db else seg(lo, hi, b0, b1)
    ystar = (b0 - a0) / (a1 - b1)
    if ystar <= lo or ystar >= hi:
        mid = 0.5 * (lo + hi)
        if a0 + a1 * mid <= b0 + b1 * mid:
            return seg(lo, hi, a0, a1)
        return seg(lo, hi, b0, b1)
    first_is_a = da <= db
    if first_is_a:
        return seg(lo, ystar, a0, a1) + seg(ystar, hi, b0, b1)
    return seg(lo, ystar, b0, b1) + seg(ystar, hi, a0, a1)


def _observe_value(n: int, k: int, hist: tuple, panels: int) -> float:
    """Expected optimal value about to observe X_k given passed values.

    hist is sorted.  The final two levels are closed form; earlier levels
    integrate numerically with Gauss-Legendre panels split at the passed
    values (the acceptance rank jumps there).
    """
    m = len(hist)
    if k == n:
        # forced acceptance: E[1 + #{passed <= y}] integrated over y
        return 1.0 + sum(1.0 - v for v in hist)
    if k == n - 1:
        base = 2.0 + sum(1.0 - v for v in hist)  # continue branch: base - y
        bounds = [0.0, *hist, 1.0]
        total = 0.0
        for i in range(len(bounds) - 1):
            lo, hi = bounds[i], bounds[i + 1]
            a0 = 1.0 + i  # passed values below this segment
            total += _int_min_linear(lo, hi, a0, float(n - k), base, -1.0)
        return total
    bounds = [0.0, *hist, 1.0]
    total = 0.0
    for i in range(len(bounds) - 1):
        lo, hi = bounds[i], bounds[i + 1]
        if hi <= lo:
            continue
        nseg = max(1, round(panels * (hi - lo)))
        edges = np.linspace(lo, hi, nseg + 1)
        for j in range(nseg):
            half = 0.5 * (edges[j + 1] - edges[j])
            mid = 0.5 * (edges[j] + edges[j + 1])
            for node, w in zip(_GL_NODES, _GL_WEIGHTS):
                y = mid + half * node
                accept = 1.0 + i + 1.0 * (n - k) * y
                pos = bisect.bisect_left(hist, y)
                cont = _observe_value(
                    n, k + 1, hist[:pos] + (y,) + hist[pos:], panels
                )
                total += w * half * min(accept, cont)
    return total


def optimal_value(n: int, tol: float = 1e-4) -> ExactValue:
    """Optimal expected final rank v_n under full history dependence.

    Panels are doubled until successive values differ by less than tol;
    the last difference is reported as the error bound.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 4:
        raise ResourceBoundError(
            "optimal_value supports n <= 4: the optimal rule is fully history "
            "dependent, so the state space is an (n-1)-dimensional integral"
        )
    if n <= 2:
        value = _observe_value(n, 1, (), 0)
        return ExactValue(n=n, value=value, method="closed-form",
                          quadrature_error_bound=0.0)
    prev = _observe_value(n, 1, (), 4)
    panels = 8
    while True:
        cur = _observe_value(n, 1, (), panels)
        err = abs(cur - prev)
        if err < tol or panels >= 128:
            return ExactValue(n=n, value=cur, method="quadrature",
                              quadrature_error_bound=err)
        prev = cur
        panels *= 2


_TRUNC_GRID = 4001
_TRUNC_MAX_N = 50
_TRUNC_MAX_LEVEL = 2


def _truncated_tables(n: int) -> np.ndarray:
    """W[k, i]: optimal expected min(2, loss) before the k-th observation
    with running minimum grid[i].  Backward trapezoid recursion."""
    grid = np.linspace(0.0, 1.0, _TRUNC_GRID)
    w = np.empty((n + 1, _TRUNC_GRID))
    w[n] = 2.0 - grid
    for k in range(n - 1, 0, -1):
        accept = 2.0 - (1.0 - grid) ** (n - k)
        g = np.minimum(accept, w[k + 1])
        cum = np.concatenate(
            ([0.0], np.cumsum((g[1:] + g[:-1]) / 2.0 * np.diff(grid)))
        )
        w[k] = cum + (1.0 - grid) * w[k + 1]
    return w


def truncated_value(n: int, level: int) -> TruncationSpec:
    """Optimal expected truncated loss min(level, L): a lower bound for v_n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 1 <= level <= n:
        raise ValueError("level must be in 1..n")
    if level > _TRUNC_MAX_LEVEL or n > _TRUNC_MAX_N:
        raise ResourceBoundError(
            f"truncated_value supports level <= {_TRUNC_MAX_LEVEL} and "
            f"n <= {_TRUNC_MAX_N}: state storage grows exponentially in "
            "the truncation level"
        )
    if level == 1:
        return TruncationSpec(n=n, level=1, value=1.0)
    if n == 1:
        return TruncationSpec(n=1, level=level, value=1.0)
    w = _truncated_tables(n)
    return TruncationSpec(n=n, level=2, value=float(w[1, -1]))


class TruncatedLevel2Policy:
    """Optimal policy for the level-2 truncated loss (rank-1-or-bust).

    Accepts at step k iff the immediate truncated loss beats the
    continuation value at the updated running minimum.
    """

    def __init__(self, n: int):
        self.n = n
        self._w = _truncated_tables(n)
        self._grid = np.linspace(0.0, 1.0, _TRUNC_GRID)

    def decide(self, k: int, x: float, history: Sequence[float], n: int) -> bool:
        m = float(min(history)) if len(history) else 1.0
        accept = 2.0 - (1.0 if x < m else 0.0) * (1.0 - x) ** (n - k)
        cont = float(np.interp(min(m, x), self._grid, self._w[k + 1]))
        return accept <= cont
