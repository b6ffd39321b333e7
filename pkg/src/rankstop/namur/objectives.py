"""Objectives and the machine's decision rule.

Two objective kinds exist: hit one exact final rank, or land in the best
q percent.  For rank 1 the machine plays the 1/e rule on inferred
CDF-time: accept the first relative-rank-1 arrival after time fraction
1/e.  For percentile objectives it reads a small threshold table,
built offline by simulation over uniform [0, 1]-time: before tau1 accept
nothing, between tau1 and tau2 accept relative ranks up to half the
target count, after tau2 up to the full target count, where the target
count is ceil(q * N-hat) with N-hat the posterior median of N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .. import rng
from .basket import DistributionBasket
from .inference import fit_distribution, posterior_median_count

EXACT_RANK = "EXACT_RANK"
TOP_PERCENT = "TOP_PERCENT"

INV_E = 1.0 / math.e


@dataclass(frozen=True)
class Objective:
    kind: str
    param: float  # rank for EXACT_RANK, percentage (0, 100] for TOP_PERCENT

    def __post_init__(self):
        if self.kind not in (EXACT_RANK, TOP_PERCENT):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        if self.kind == EXACT_RANK and (self.param < 1 or self.param != int(self.param)):
            raise ValueError("EXACT_RANK needs an integer rank >= 1")
        if self.kind == TOP_PERCENT and not 0 < self.param <= 100:
            raise ValueError("TOP_PERCENT needs q in (0, 100]")

    def satisfied(self, final_rank: int, n: int) -> bool:
        if self.kind == EXACT_RANK:
            return final_rank == int(self.param)
        return final_rank <= math.ceil(self.param / 100.0 * n)


@dataclass(frozen=True)
class ThresholdTable:
    """q -> (tau1, tau2) acceptance windows on uniform [0, 1]-time."""

    taus: dict
    build_seed: int | None = None

    def windows(self, q: float) -> tuple[float, float]:
        qs = sorted(self.taus)
        nearest = min(qs, key=lambda v: abs(v - q))
        return self.taus[nearest]

    def to_json(self) -> str:
        return json.dumps(
            {"taus": {str(k): list(v) for k, v in self.taus.items()},
             "build_seed": self.build_seed}
        )

    @classmethod
    def from_json(cls, text: str) -> "ThresholdTable":
        d = json.loads(text)
        return cls(
            taus={float(k): tuple(v) for k, v in d["taus"].items()},
            build_seed=d.get("build_seed"),
        )


def load_default_table() -> ThresholdTable:
    text = resources.files("rankstop.data").joinpath("toppct_table.json").read_text()
    return ThresholdTable.from_json(text)


def allowed_rank(q: float, n_hat: int, s: float, table: ThresholdTable) -> int:
    """Largest acceptable relative rank at CDF-time s."""
    tau1, tau2 = table.windows(q)
    target = max(1, math.ceil(q / 100.0 * n_hat))
    if s < tau1:
        return 0
    if s < tau2:
        return max(1, target // 2)
    return target


def machine_decide(
    times,
    rel_ranks,
    objective: Objective,
    basket: DistributionBasket,
    m_max: int,
    table: ThresholdTable | None = None,
    known_exhausted: bool = False,
) -> bool:
    """Decision for the newest arrival given everything revealed so far.

    ``times`` and ``rel_ranks`` include the current arrival (the last
    element).  The arrival distribution is re-fitted on every call; the
    plug-in rule uses the fitted CDF for elapsed time and the posterior
    median for the remaining count.
    """
    times = np.asarray(times, dtype=np.float64)
    k = len(times)
    if known_exhausted or k >= m_max:
        return True
    f_idx = fit_distribution(times, basket)
    s = float(basket.entries[f_idx].cdf(times[-1]))
    r = int(rel_ranks[-1])
    if objective.kind == EXACT_RANK and int(objective.param) == 1:
        return r == 1 and s > INV_E
    if table is None:
        table = load_default_table()
    n_hat = posterior_median_count(k, s, m_max)
    if objective.kind == EXACT_RANK:
        # ranks beyond 1: wait out the early game, then take the first
        # arrival sitting exactly on the target relative rank
        q = min(100.0, 100.0 * float(objective.param) / max(1, n_hat))
        return r == int(objective.param) and s >= table.windows(q)[1]
    return r <= allowed_rank(objective.param, n_hat, s, table)


@lru_cache(maxsize=262144)
def _median_cached(k: int, s_q: float, m_max: int) -> int:
    return posterior_median_count(k, s_q, m_max)


def _simulate_top_percent(
    q: float, tau1: float, tau2: float, m_max: int, trials: int, seed: int
) -> float:
    """Success frequency of the banded rule on uniform-time games."""
    gen = rng.stream(seed, "table-build", int(q * 10))
    table = ThresholdTable({q: (tau1, tau2)})
    wins = 0
    for _ in range(trials):
        n = int(gen.integers(1, m_max + 1))
        times = np.sort(gen.random(n))
        values = gen.random(n)
        order = np.argsort(values, kind="stable")
        final = np.empty(n, dtype=np.int64)
        final[order] = np.arange(1, n + 1)
        rel = np.array([1 + int((values[:i] <= values[i]).sum()) for i in range(n)])
        chosen = n - 1
        for i in range(n - 1):
            s = max(times[i], 1e-9)
            n_hat = _median_cached(i + 1, round(s, 3), m_max)
            if rel[i] <= allowed_rank(q, n_hat, s, table):
                chosen = i
                break
        if final[chosen] <= math.ceil(q / 100.0 * n):
            wins += 1
    return wins / trials


def build_toppct_table(
    qs=(5.0, 10.0, 20.0, 30.0, 50.0),
    m_max: int = 60,
    trials: int = 1500,
    seed: int = 20260401,
) -> ThresholdTable:
    """Grid-search tau windows per q by direct simulation."""
    taus = {}
    grid1 = np.linspace(0.05, 0.55, 11)
    for q in qs:
        best = (-1.0, (0.2, 0.5))
        for tau1 in grid1:
            for tau2 in np.arange(tau1, 0.96, 0.1):
                f = _simulate_top_percent(q, float(tau1), float(tau2), m_max, trials, seed)
                if f > best[0]:
                    best = (f, (float(tau1), float(tau2)))
        taus[float(q)] = best[1]
    return ThresholdTable(taus=taus, build_seed=seed)
