"""Instance generation, rank accounting, and Monte Carlo policy evaluation.

The sequential selection game: n values, i.i.d. uniform on [0, 1], are
observed one at a time; exactly one must be accepted, irrevocably, and the
loss is the accepted value's final rank among all n (rank 1 = smallest).
Ties, which have probability zero under the model but can occur in
adversarial inputs, are broken by arrival index: of two equal values the
earlier one ranks lower.  Under that rule final ranks are always a
permutation of 1..n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from . import rng
from .kernels import cloud_sim, final_ranks_of, threshold_sim

ACCEPT = True
PASS = False


@dataclass(frozen=True)
class GameInstance:
    """One realised sequence of values (and, for timed games, arrivals)."""

    n: int
    values: np.ndarray
    arrival_times: np.ndarray | None = None
    seed: tuple = ()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", values)
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if values.shape != (self.n,):
            raise ValueError(f"expected {self.n} values, got shape {values.shape}")
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise ValueError("values must lie in [0, 1]")
        if self.arrival_times is not None:
            t = np.asarray(self.arrival_times, dtype=np.float64)
            object.__setattr__(self, "arrival_times", t)
            if t.shape != (self.n,):
                raise ValueError("arrival_times length must equal n")
            if self.n > 1 and np.any(np.diff(t) <= 0.0):
                raise ValueError("arrival_times must be strictly increasing")


@dataclass(frozen=True)
class RankView:
    """Relative ranks r_k (among the first k) and final ranks R_k."""

    relative_ranks: np.ndarray
    final_ranks: np.ndarray


@dataclass(frozen=True)
class EvalReport:
    """Monte Carlo estimate of a policy's expected final rank."""

    mean_rank: float
    std_error: float
    replications: int
    seed: int
    generator: str = rng.GENERATOR_NAME


@runtime_checkable
class StrategyPolicy(Protocol):
    """Sequential decision rule.

    ``decide`` sees the arrival counter k (1-based), the current value,
    the values observed before it, and the horizon n; it returns ACCEPT
    or PASS.  Acceptance at k = n is forced by every evaluator, so a
    policy that always passes still accepts the last observation.
    """

    def decide(self, k: int, x: float, history: Sequence[float], n: int) -> bool: ...


def sample_instance(
    n: int, seed: int, timed: bool = False, horizon: float = 1.0
) -> GameInstance:
    """n i.i.d. uniform values; optionally timed arrivals on [0, horizon]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    gen = rng.stream(seed, "instance")
    values = gen.random(n)
    times = None
    if timed:
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        times = np.sort(gen.random(n)) * horizon
    return GameInstance(n=n, values=values, arrival_times=times, seed=(seed,))


def rank_view(values: np.ndarray) -> RankView:
    """Relative and final ranks with the index tie rule."""
    v = np.asarray(values, dtype=np.float64)
    n = v.shape[0]
    rel = np.empty(n, dtype=np.int64)
    fin = np.empty(n, dtype=np.int64)
    for k in range(n):
        rel[k] = 1 + int(np.sum(v[:k] <= v[k]))
        fin[k] = int(np.sum(v < v[k]) + np.sum(v[: k + 1] == v[k]))
    return RankView(relative_ranks=rel, final_ranks=fin)


def loss_of(instance: GameInstance, accepted_index: int) -> int:
    """Final rank of the accepted observation; accepted_index is 1-based."""
    if not 1 <= accepted_index <= instance.n:
        raise ValueError(f"accepted_index must be in 1..{instance.n}")
    v = instance.values
    k = accepted_index - 1
    x = v[k]
    return int(np.sum(v < x) + np.sum(v[: k + 1] == x))


def decide_instance(policy: StrategyPolicy, instance: GameInstance) -> int:
    """Walk a policy over one instance; returns the accepted 1-based index."""
    v = instance.values
    n = instance.n
    for k in range(1, n):
        if policy.decide(k, float(v[k - 1]), v[: k - 1], n):
            return k
    return n


def _sim_blocks(n: int, replications: int, seed: int, tag: str):
    done = 0
    b = 0
    while done < replications:
        rows = min(rng.BLOCK_SIZE, replications - done)
        gen = rng.stream(seed, tag, b)
        yield gen.random((rows, n))
        done += rows
        b += 1


def evaluate_policy(
    policy: StrategyPolicy, n: int, replications: int, seed: int
) -> EvalReport:
    """Mean and standard error of the accepted observation's final rank.

    Policies exposing ``simulation_plan()`` (threshold and cloud rules)
    run on the vectorised kernels; anything else falls back to a generic
    per-replication walk of ``decide``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if replications < 1:
        raise ValueError("replications must be >= 1")
    plan_fn = getattr(policy, "simulation_plan", None)
    plan = plan_fn(n) if plan_fn is not None else None
    total = 0.0
    total_sq = 0.0
    for values in _sim_blocks(n, replications, seed, "eval"):
        if plan is None:
            ranks = np.empty(values.shape[0], dtype=np.int64)
            for i in range(values.shape[0]):
                row = values[i]
                acc = n - 1
                for k in range(1, n):
                    if policy.decide(k, float(row[k - 1]), row[: k - 1], n):
                        acc = k - 1
                        break
                ranks[i] = final_ranks_of(row[None, :], np.array([acc]))[0]
        elif plan[0] == "threshold":
            _, ranks = threshold_sim(values, plan[1])
        elif plan[0] == "cloud":
            _, ranks = cloud_sim(values, *plan[1])
        else:
            raise ValueError(f"unknown simulation plan {plan[0]!r}")
        total += float(ranks.sum())
        total_sq += float((ranks.astype(np.float64) ** 2).sum())
    mean = total / replications
    if replications > 1:
        var = max(0.0, (total_sq - replications * mean * mean) / (replications - 1))
        se = math.sqrt(var / replications)
    else:
        se = 0.0
    return EvalReport(
        mean_rank=mean, std_error=se, replications=replications, seed=seed
    )


def correlation_check(n: int, replications: int, k: int, seed: int) -> float:
    """Sample correlation of (X_k, R_k) over independent instances.

    Converges to sqrt((n-1)/(n+1)) for every k.
    """
    if n < 2:
        raise ValueError("correlation requires n >= 2")
    if not 1 <= k <= n:
        raise ValueError("k must be in 1..n")
    sx = sr = sxx = srr = sxr = 0.0
    col = k - 1
    for values in _sim_blocks(n, replications, seed, "corr"):
        x = values[:, col]
        idx = np.full(values.shape[0], col, dtype=np.int64)
        r = final_ranks_of(values, idx).astype(np.float64)
        sx += float(x.sum())
        sr += float(r.sum())
        sxx += float((x * x).sum())
        srr += float((r * r).sum())
        sxr += float((x * r).sum())
    m = replications
    cov = sxr / m - (sx / m) * (sr / m)
    vx = sxx / m - (sx / m) ** 2
    vr = srr / m - (sr / m) ** 2
    return cov / math.sqrt(vx * vr)
