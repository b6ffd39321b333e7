"""Live game sessions: hidden timed instance, reveals, decisions.

A session draws a hidden count N uniformly from {1..M} and a hidden CDF
from the basket, realises N arrival times (sorted CDF samples) with
i.i.d. uniform values, and then reveals one arrival at a time as
(time, relative rank).  Values, N, and the chosen CDF stay hidden until
the session closes.  Exactly one arrival is accepted: a PASS on the
last arrival becomes a forced acceptance and the session closes as
EXHAUSTED.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

import numpy as np

from .. import rng
from ..core import rank_view
from .basket import DistributionBasket
from .inference import joint_belief

OPEN = "OPEN"
ACCEPTED = "ACCEPTED"
EXHAUSTED = "EXHAUSTED"


@dataclass
class Session:
    id: str
    m_max: int
    basket: DistributionBasket
    seed: int
    # hidden until close
    n_total: int
    f_index: int
    times: np.ndarray
    values: np.ndarray
    rel_ranks: np.ndarray
    final_ranks: np.ndarray
    # live state
    revealed: int = 0
    awaiting_decision: bool = False
    decisions: list = field(default_factory=list)
    status: str = OPEN
    accepted_index: int | None = None  # 1-based
    outcome_rank: int | None = None
    forced: bool = False
    belief_trace: list = field(default_factory=list)
    objective: dict | None = None
    objective_secret: bool = False
    player: str = "human"

    def arrivals_seen(self) -> list[dict]:
        return [
            {"t": float(self.times[i]), "rel_rank": int(self.rel_ranks[i])}
            for i in range(self.revealed)
        ]

    def advance(self) -> dict:
        if self.status != OPEN:
            raise RuntimeError("session is closed")
        if self.awaiting_decision:
            raise RuntimeError("decision pending for the current arrival")
        i = self.revealed
        self.revealed += 1
        self.awaiting_decision = True
        belief = joint_belief(
            self.times[: self.revealed], self.basket, self.m_max
        )
        self.belief_trace.append(
            {
                "arrival": self.revealed,
                "f_weights": belief.sum(axis=1).tolist(),
                "n_median": int(
                     np.searchsorted(np.cumsum(belief.sum(axis=0)), 0.5) + 1
                ),
            }
        )
        return {"t": float(self.times[i]), "rel_rank": int(self.rel_ranks[i])}

    def decide(self, accept: bool) -> None:
        if self.status != OPEN:
            raise RuntimeError("session is closed")
        if not self.awaiting_decision:
            raise RuntimeError("no arrival awaiting a decision")
        self.awaiting_decision = False
        k = self.revealed
        if accept:
            self.decisions.append("ACCEPT")
            self._close(k, forced=False)
        else:
            self.decisions.append("PASS")
            if k == self.n_total:
                self._close(k, forced=True)

    def _close(self, k: int, forced: bool) -> None:
        self.accepted_index = k
        self.outcome_rank = int(self.final_ranks[k - 1])
        self.forced = forced
        self.status = EXHAUSTED if forced else ACCEPTED

    @property
    def closed(self) -> bool:
        return self.status != OPEN

    def record(self) -> dict:
        """Full session record; only safe to persist or reveal once closed."""
        return {
            "id": self.id,
            "M": self.m_max,
            "basket": self.basket.names(),
            "seed": self.seed,
            "player": self.player,
            "objective": self.objective,
            "objective_secret": self.objective_secret,
            "arrivals": self.arrivals_seen(),
            "decisions": list(self.decisions),
            "outcome": {
                "final_rank": self.outcome_rank,
                "N": self.n_total,
                "true_F": self.basket.names()[self.f_index],
                "forced": self.forced,
            },
            "values": self.values[: self.revealed].tolist(),
            "times": self.times[: self.revealed].tolist(),
            "belief_trace": list(self.belief_trace),
            "status": self.status,
        }


def new_session(
    m_max: int,
    basket: DistributionBasket,
    seed: int,
    objective: dict | None = None,
    objective_secret: bool = False,
    player: str = "human",
    session_id: str | None = None,
) -> Session:
    if m_max < 1:
        raise ValueError("M must be >= 1")
    if len(basket) == 0:
        raise ValueError("basket must be nonempty")
    gen = rng.stream(seed, "session")
    n_total = int(gen.integers(1, m_max + 1))
    f_index = int(gen.integers(len(basket)))
    times = np.sort(basket.entries[f_index].sample(gen, n_total))
    values = gen.random(n_total)
    rv = rank_view(values)
    return Session(
        id=session_id or uuid.uuid4().hex[:12],
        m_max=m_max,
        basket=basket,
        seed=seed,
        n_total=n_total,
        f_index=f_index,
        times=times,
        values=values,
        rel_ranks=rv.relative_ranks,
        final_ranks=rv.final_ranks,
        objective=objective,
        objective_secret=objective_secret,
        player=player,
    )


def replay(record: dict, basket: DistributionBasket) -> Session:
    """Rebuild a closed session from its record and re-apply decisions."""
    s = new_session(
        m_max=record["M"],
        basket=basket,
        seed=record["seed"],
        objective=record.get("objective"),
        objective_secret=record.get("objective_secret", False),
        player=record.get("player", "human"),
        session_id=record["id"],
    )
    for d in record["decisions"]:
        s.advance()
        s.decide(d == "ACCEPT")
    return s
