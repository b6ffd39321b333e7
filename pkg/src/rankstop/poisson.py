"""Continuous-time embedding on a rate-1 planar Poisson process.

Points (T_k, X_k) arrive on [0, t] x [0, 1]; at most one may be accepted,
at its arrival time, and the loss is its rank among all points arriving
by the horizon, or a penalty if nothing was accepted.  Threshold play
accepts the first point under phi(s) = c / (t - s + c).  The value of
that rule has a closed survival factor exp(-mu(s)) and reduces, after
integrating the cross term in closed form, to one-dimensional adaptive
quadrature; a vectorised simulator provides the independent check.

``h_from_simulation`` estimates the conditional-value gap h(t, x): the
extra expected loss caused by an unacceptable value x planted at time 0.
Under threshold play the planted point changes nothing except adding 1
to the accepted rank whenever the accepted value is at least x, so with
common random numbers the gap is exactly the frequency of that event.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import rng


@dataclass(frozen=True)
class PoissonInstance:
    horizon: float
    arrivals: np.ndarray  # sorted times in [0, horizon]
    values: np.ndarray  # matching values in [0, 1]

    @property
    def count(self) -> int:
        return int(self.arrivals.shape[0])


def sample_poisson(t: float, seed: int) -> PoissonInstance:
    if t <= 0:
        raise ValueError("horizon must be positive")
    gen = rng.stream(seed, "poisson")
    n = int(gen.poisson(t))
    arrivals = np.sort(gen.random(n)) * t
    values = gen.random(n)
    return PoissonInstance(horizon=t, arrivals=arrivals, values=values)


@dataclass(frozen=True)
class ContinuousThreshold:
    """phi(s) = c / (t - s + c) on [0, t].

    ``unit_form=True`` switches to the fixed-denominator variant
    c / (1 - s + c), usable for horizon <= 1 experiments.
    """

    c: float
    horizon: float
    unit_form: bool = False

    def __post_init__(self):
        if self.c <= 1.0:
            raise ValueError("c must exceed 1")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.unit_form and self.horizon > 1.0:
            raise ValueError("unit_form thresholds are only valid for horizon <= 1")

    @property
    def _base(self) -> float:
        return 1.0 if self.unit_form else self.horizon

    def phi(self, s):
        return self.c / (self._base - np.asarray(s) + self.c)

    def mu(self, s: float) -> float:
        base = self._base
        return self.c * math.log((base + self.c) / (base - s + self.c))

    def survival(self, s: float) -> float:
        """P(no acceptance by time s) = exp(-mu(s))."""
        return math.exp(-self.mu(s))


def mu_of(ct: ContinuousThreshold, s: float) -> float:
    """Integrated threshold intensity int_0^s phi(u) du, closed form."""
    if not 0.0 <= s <= ct.horizon:
        raise ValueError("s must lie in [0, horizon]")
    return ct.mu(s)


def _cross_inner(ct: ContinuousThreshold, s: float) -> float:
    """Closed form of int_0^s (phi(s)-phi(u))^2 du.

    Earlier arrivals that were passed form a unit-rate Poisson field
    above the threshold curve, so the expected number of them below an
    accepted value x is int (x - phi(u))+ du, unweighted; integrating x
    over [0, phi(s)] gives this kernel.
    """
    c = ct.c
    base = ct._base
    a = base - s + c
    top = base + c
    return c * c * (s / (a * a) - (2.0 / a) * math.log(top / a) + 1.0 / a - 1.0 / top)


def _cross_inner_conditional(ct: ContinuousThreshold, s: float) -> float:
    """Closed form of int_0^s (phi(s)-phi(u))^2 / (1-phi(u)) du.

    Variant kernel that weights each passed arrival by the conditional
    density of its value on (phi(u), 1].  Kept for comparison: it
    overstates the simulated threshold-play loss (the Poisson field
    above the curve needs no such conditioning), so it is not the
    default.
    """
    c = ct.c
    base = ct._base
    a = base - s + c
    top = base + c
    out = c * c * s / (a * a) - c * math.log(top / a)
    rem = base - s
    if rem > 0.0:
        out += (c * rem * rem / (a * a)) * math.log(base / rem)
    return out


def default_penalty(t: float) -> float:
    """Loss for never stopping: expected rank of a uniformly random pick
    among the ~t arrivals, roughly 1 + t/2.  Lipschitz, penalty(0) = 1."""
    return 1.0 + t / 2.0


def zero_start_penalty(t: float) -> float:
    """Variant with penalty(0) = 0, for the vanishing-horizon limit."""
    return t / 2.0


@dataclass(frozen=True)
class WResult:
    value: float
    error_estimate: float


def value_W(
    ct: ContinuousThreshold,
    penalty=default_penalty,
    tol: float = 1e-9,
    conditional_cross: bool = False,
) -> WResult:
    """Expected loss of threshold play with horizon t.

    W = 1 + (penalty(t) - 1) e^{-mu(t)}
        + 1/2 int phi(s)^2 (t - s) e^{-mu(s)} ds
        + 1/2 int [cross(s)] e^{-mu(s)} ds

    The cross kernel defaults to the unweighted form, which agrees with
    direct simulation of threshold play; ``conditional_cross=True``
    selects the conditionally weighted variant instead.
    """
    t = ct.horizon
    cross = _cross_inner_conditional if conditional_cross else _cross_inner

    def surv(s: float) -> float:
        return ct.survival(s)

    def f1(s: float) -> float:
        p = float(ct.phi(s))
        return p * p * (t - s) * surv(s)

    def f2(s: float) -> float:
        return cross(ct, s) * surv(s)

    i1, e1 = integrate.quad(f1, 0.0, t, epsabs=tol, epsrel=tol, limit=200)
    i2, e2 = integrate.quad(f2, 0.0, t, epsabs=tol, epsrel=tol, limit=200)
    if not (math.isfinite(i1) and math.isfinite(i2)):
        raise ArithmeticError("threshold value quadrature diverged")
    value = 1.0 + (penalty(t) - 1.0) * surv(t) + 0.5 * i1 + 0.5 * i2
    return WResult(value=value, error_estimate=0.5 * (e1 + e2))


def simulate_threshold_play(
    ct: ContinuousThreshold,
    replications: int,
    seed: int,
    penalty=default_penalty,
    phantom_grid: np.ndarray | None = None,
):
    """Vectorised threshold play on Poisson instances.

    Returns (losses, stopped, accepted_values); losses already include
    the penalty on never-stopped paths.  ``phantom_grid`` is unused here
    but kept for signature parity with the h-table builder.
    """
    t = ct.horizon
    losses = np.empty(replications)
    stopped = np.zeros(replications, dtype=bool)
    accepted = np.full(replications, np.nan)
    done = 0
    blk = 0
    while done < replications:
        rows = min(rng.BLOCK_SIZE, replications - done)
        gen = rng.stream(seed, "poisson-play", blk)
        counts = gen.poisson(t, size=rows)
        total = int(counts.sum())
        times = gen.random(total) * t
        values = gen.random(total)
        rep = np.repeat(np.arange(rows), counts)
        order = np.lexsort((times, rep))
        times = times[order]
        values = values[order]
        hit = values <= ct.phi(times)
        pos = np.arange(total)
        starts = np.concatenate(([0], np.cumsum(counts)))[:-1]
        nz = counts > 0
        first = np.full(rows, -1, dtype=np.int64)
        if total:
            cand = np.where(hit, pos, total)
            mins = np.minimum.reduceat(cand, starts[nz]) if nz.any() else np.array([])
            ends = starts[nz] + counts[nz]
            ok = mins < ends
            rows_nz = np.flatnonzero(nz)
            first[rows_nz[ok]] = mins[ok]
        stop = first >= 0
        x_acc = np.full(rows, np.inf)
        x_acc[stop] = values[first[stop]]
        loss = np.full(rows, penalty(t))
        if total:
            le = values <= np.repeat(x_acc, counts)
            ranks = np.zeros(rows)
            ranks[nz] = np.add.reduceat(le, starts[nz])
            loss[stop] = ranks[stop]
        losses[done : done + rows] = loss
        stopped[done : done + rows] = stop
        accepted[done : done + rows] = np.where(stop, x_acc, np.nan)
        done += rows
        blk += 1
    return losses, stopped, accepted


def mc_threshold_value(
    ct: ContinuousThreshold, replications: int, seed: int, penalty=default_penalty
) -> tuple[float, float]:
    losses, _, _ = simulate_threshold_play(ct, replications, seed, penalty)
    return float(losses.mean()), float(losses.std(ddof=1) / math.sqrt(replications))


@dataclass
class HTable:
    """Bilinear table of the conditional-value gap h(t, x).

    Outside the time grid h fades linearly: proportionally to t below the
    first knot (h(0, x) = 0) and down to zero over one grid span past the
    last knot, honouring h -> 0 as t -> infinity.
    """

    grid_t: np.ndarray
    grid_x: np.ndarray
    values: np.ndarray  # shape (len(grid_t), len(grid_x))
    std_errors: np.ndarray
    effective: np.ndarray  # stopped-path count per time knot
    min_effective: int = 100
    seed: int | None = None
    c: float | None = None

    def usable(self) -> np.ndarray:
        return self.effective >= self.min_effective

    def _row_at(self, t: float) -> np.ndarray:
        gt = self.grid_t
        if t <= 0.0:
            return np.zeros_like(self.grid_x)
        if t <= gt[0]:
            return self.values[0] * (t / gt[0])
        if t >= gt[-1]:
            span = gt[-1] - gt[-2] if len(gt) > 1 else gt[-1]
            fade = max(0.0, 1.0 - (t - gt[-1]) / span)
            return self.values[-1] * fade
        i = int(np.searchsorted(gt, t) - 1)
        w = (t - gt[i]) / (gt[i + 1] - gt[i])
        return (1.0 - w) * self.values[i] + w * self.values[i + 1]

    def __call__(self, t: float, x) -> np.ndarray:
        row = self._row_at(t)
        return np.interp(np.asarray(x, dtype=np.float64), self.grid_x, row)

    def to_json(self) -> str:
        return json.dumps(
            {
                "grid_t": self.grid_t.tolist(),
                "grid_x": self.grid_x.tolist(),
                "values": self.values.tolist(),
                "std_errors": self.std_errors.tolist(),
                "effective": self.effective.tolist(),
                "min_effective": self.min_effective,
                "seed": self.seed,
                "c": self.c,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "HTable":
        d = json.loads(text)
        return cls(
            grid_t=np.asarray(d["grid_t"], dtype=np.float64),
            grid_x=np.asarray(d["grid_x"], dtype=np.float64),
            values=np.asarray(d["values"], dtype=np.float64),
            std_errors=np.asarray(d["std_errors"], dtype=np.float64),
            effective=np.asarray(d["effective"], dtype=np.int64),
            min_effective=int(d.get("min_effective", 100)),
            seed=d.get("seed"),
            c=d.get("c"),
        )


def h_from_simulation(
    grid_t,
    grid_x,
    replications: int,
    seed: int,
    c: float = 1.9469,
) -> HTable:
    """Estimate h(t, x) under threshold play with a planted phantom.

    A phantom value x at time 0 cannot be accepted and does not alter
    threshold decisions, so with shared paths the loss difference is the
    indicator {stopped and accepted value >= x}; h is its mean.
    """
    grid_t = np.asarray(grid_t, dtype=np.float64)
    grid_x = np.asarray(grid_x, dtype=np.float64)
    values = np.zeros((len(grid_t), len(grid_x)))
    errs = np.zeros_like(values)
    eff = np.zeros(len(grid_t), dtype=np.int64)
    for i, t in enumerate(grid_t):
        ct = ContinuousThreshold(c=c, horizon=float(t))
        _, stopped, accepted = simulate_threshold_play(
            ct, replications, seed + i, penalty=default_penalty
        )
        eff[i] = int(stopped.sum())
        acc = np.where(stopped, accepted, -np.inf)
        for j, x in enumerate(grid_x):
            p = float((acc >= x).mean())
            values[i, j] = p
            errs[i, j] = math.sqrt(max(p * (1.0 - p), 0.0) / replications)
    return HTable(
        grid_t=grid_t,
        grid_x=grid_x,
        values=values,
        std_errors=errs,
        effective=eff,
        seed=seed,
        c=c,
    )
