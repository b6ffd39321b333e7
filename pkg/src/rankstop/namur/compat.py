"""Compatibility ledger: the machine's belief about a secret objective.

After each finished game the ledger multiplies every hypothesis weight
by a soft-likelihood factor for the observed (final rank, N) and
renormalises.  Percentile hypotheses use a specificity-weighted factor,
1/target-count when the outcome lands inside the target set: nested
hypotheses (top 50 percent contains top 20 percent) would otherwise
dominate whatever the player does.  Exact-rank hypotheses decay
geometrically in the distance to the target rank.  A small uniform
mixture keeps every factor positive so no hypothesis dies on one fluke.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .objectives import EXACT_RANK, TOP_PERCENT, Objective


@dataclass(frozen=True)
class ObjectiveHypothesis:
    objective: Objective
    weight: float


def default_grid() -> list[Objective]:
    ranks = [Objective(EXACT_RANK, r) for r in (1, 2, 3)]
    tops = [Objective(TOP_PERCENT, q) for q in (5.0, 10.0, 20.0, 30.0, 50.0)]
    return ranks + tops


@dataclass
class CompatibilityLedger:
    grid: list[Objective] = field(default_factory=default_grid)
    beta: float = 0.5  # geometric decay outside the target set
    noise: float = 0.1  # uniform mixture weight
    weights: np.ndarray | None = None
    updates: list = field(default_factory=list)

    def __post_init__(self):
        if self.weights is None:
            self.weights = np.full(len(self.grid), 1.0 / len(self.grid))

    def factor(self, hypothesis: Objective, final_rank: int, n: int) -> float:
        """Soft likelihood of an outcome rank under one hypothesis.

        Each hypothesis induces a proper distribution over ranks 1..n:
        uniform mass on its target set with a geometric tail outside.
        Normalising makes broad and narrow hypotheses comparable, so
        that top-50 cannot dominate top-20 merely by containing it.
        """
        ranks = np.arange(1, n + 1, dtype=np.float64)
        if hypothesis.kind == EXACT_RANK:
            u = self.beta ** np.abs(ranks - int(hypothesis.param))
        else:
            m = math.ceil(hypothesis.param / 100.0 * n)
            u = np.where(ranks <= m, 1.0, self.beta ** (ranks - m))
        u = u / u.sum()
        return float((1.0 - self.noise) * u[final_rank - 1] + self.noise / n)

    def update(self, final_rank: int, n: int, game_id: str | None = None):
        factors = np.array([self.factor(h, final_rank, n) for h in self.grid])
        self.weights = self.weights * factors
        self.weights = self.weights / self.weights.sum()
        self.updates.append(
            {"game": game_id, "final_rank": final_rank, "n": n,
             "factors": factors.tolist()}
        )
        return self

    def hypotheses(self) -> list[ObjectiveHypothesis]:
        return [
            ObjectiveHypothesis(objective=o, weight=float(w))
            for o, w in zip(self.grid, self.weights)
        ]

    def argmax(self) -> Objective:
        return self.grid[int(np.argmax(self.weights))]

    def snapshot(self) -> dict:
        return {
            "hypotheses": [
                {"kind": o.kind, "param": o.param, "weight": float(w)}
                for o, w in zip(self.grid, self.weights)
            ],
            "games": len(self.updates),
        }


def update_compatibility(
    ledger: CompatibilityLedger, final_rank: int, n: int, game_id: str | None = None
) -> CompatibilityLedger:
    return ledger.update(final_rank, n, game_id)
