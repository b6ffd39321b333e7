"""Cloud-override policies and the randomized winner's-rule search.

A cloud policy wraps the one-parameter memoryless baseline with two
override rules driven by the local cloud of previously seen values:

* dissuading pre-cloud: the current value is below its threshold, but at
  least ``theta_pre`` prior values sit in the window [x - d_pc, x); each
  of them would push the accepted rank up, so pass instead;
* persuading post-cloud: the current value is just above its threshold
  (within ``accept_margin``), but at least ``theta_post`` prior values
  sit in (x, x + p_pc]; the value escaped a pile-up from above, so
  accept anyway.

An override is enabled only when its window has positive width, so the
all-zero policy is the baseline rule, decision for decision.  The
winner's-rule search perturbs one parameter at a time, keeping any
strategy whose last batch beat the reference value U = 2.3318.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import core, rng
from .memoryless import CFamilySpec, phi_family

U_REFERENCE = 2.3318

_WIDTH_PARAMS = ("d_pc", "p_pc", "accept_margin")
_COUNT_PARAMS = ("theta_pre", "theta_post")


@dataclass(frozen=True)
class CloudPolicy:
    base_c: float = 1.9469
    d_pc: float = 0.0
    theta_pre: int = 0
    p_pc: float = 0.0
    theta_post: int = 0
    accept_margin: float = 0.0

    def __post_init__(self):
        if self.base_c <= 1.0:
            raise ValueError("base_c must exceed 1")
        for name in _WIDTH_PARAMS:
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be >= 0")
        for name in _COUNT_PARAMS:
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def threshold(self, k: int, n: int) -> float:
        if k >= n:
            return 1.0
        return self.base_c / (n - k + self.base_c)

    def decide(self, k: int, x: float, history: Sequence[float], n: int) -> bool:
        accept, _ = self.decide_with_flag(k, x, history, n)
        return accept

    def decide_with_flag(
        self, k: int, x: float, history: Sequence[float], n: int
    ) -> tuple[bool, str | None]:
        """Decision plus which override (if any) produced it."""
        if k == n:
            return core.ACCEPT, None
        prior = np.asarray(history, dtype=np.float64)
        fk = self.threshold(k, n)
        if x <= fk:
            if self.d_pc > 0.0:
                n_pre = int(((prior >= x - self.d_pc) & (prior < x)).sum())
                if n_pre >= self.theta_pre:
                    return core.PASS, "pre"
            return core.ACCEPT, None
        if self.p_pc > 0.0 and self.accept_margin > 0.0 and x <= fk + self.accept_margin:
            n_post = int(((prior > x) & (prior <= x + self.p_pc)).sum())
            if n_post >= self.theta_post:
                return core.ACCEPT, "post"
        return core.PASS, None

    def simulation_plan(self, n: int):
        phi = phi_family(CFamilySpec(c=self.base_c, n=n)).phi
        return (
            "cloud",
            (phi, self.d_pc, self.theta_pre, self.p_pc, self.theta_post,
             self.accept_margin),
        )


def cloud_decide(
    policy: CloudPolicy, k: int, x: float, history: Sequence[float], n: int
) -> bool:
    return policy.decide(k, x, history, n)


@dataclass(frozen=True)
class DeltaCloudPolicy:
    """Left-right-difference variant: both windows share one width and the
    override fires on the count difference between them."""

    base_c: float = 1.9469
    width: float = 0.0
    delta_threshold: int = 0
    accept_margin: float = 0.0

    def decide(self, k: int, x: float, history: Sequence[float], n: int) -> bool:
        if k == n:
            return core.ACCEPT
        prior = np.asarray(history, dtype=np.float64)
        fk = CloudPolicy(base_c=self.base_c).threshold(k, n)
        if self.width > 0.0:
            n_pre = int(((prior >= x - self.width) & (prior < x)).sum())
            n_post = int(((prior > x) & (prior <= x + self.width)).sum())
            if x <= fk and n_pre - n_post >= self.delta_threshold:
                return core.PASS
            if (
                self.accept_margin > 0.0
                and fk < x <= fk + self.accept_margin
                and n_post - n_pre >= self.delta_threshold
            ):
                return core.ACCEPT
        return x <= fk


def evaluate_batch(
    policy: CloudPolicy, n: int, batch: int, seed: int
) -> tuple[float, float]:
    """Batch mean and standard error of the accepted final rank."""
    report = core.evaluate_policy(policy, n, batch, seed)
    return report.mean_rank, report.std_error


@dataclass(frozen=True)
class PerturbScales:
    """Relative step sizes for the winner's-rule proposal kernel.

    Widths move multiplicatively by exp(+-scale); a width currently at
    zero jumps to the scale value itself (a multiplicative step cannot
    leave zero).  Counts move by +-count_step.  A zero scale freezes the
    parameter.
    """

    d_pc: float = 0.25
    p_pc: float = 0.25
    accept_margin: float = 0.25
    width_seed: float = 0.01
    count_step: int = 1
    count_max: int = 64

    def movable(self) -> list[str]:
        names = [w for w in _WIDTH_PARAMS if getattr(self, w) > 0.0]
        if self.count_step > 0:
            names.extend(_COUNT_PARAMS)
        return names


@dataclass(frozen=True)
class SearchConfig:
    n: int
    batch: int
    rounds: int
    seed: int
    scales: PerturbScales = field(default_factory=PerturbScales)
    start: CloudPolicy = field(default_factory=CloudPolicy)
    u_reference: float = U_REFERENCE
    single_run: bool = False


@dataclass(frozen=True)
class RoundRecord:
    round: int
    policy: CloudPolicy
    mean: float
    se: float
    action: str  # kept-win | kept-coin | perturbed


@dataclass
class SearchState:
    current: CloudPolicy
    best: CloudPolicy
    best_value: float
    history: list[RoundRecord]
    baseline_u: float


def _perturb(
    policy: CloudPolicy, scales: PerturbScales, gen: np.random.Generator
) -> CloudPolicy:
    movable = scales.movable()
    if not movable:
        return policy
    for _ in range(8):  # redraw on degenerate proposals
        name = movable[int(gen.integers(len(movable)))]
        if name in _COUNT_PARAMS:
            step = int(scales.count_step) * (1 if gen.random() < 0.5 else -1)
            new = min(scales.count_max, max(0, getattr(policy, name) + step))
        else:
            old = getattr(policy, name)
            if old == 0.0:
                new = scales.width_seed
            else:
                new = old * math.exp(float(gen.uniform(-1.0, 1.0)) * getattr(scales, name))
        if new != getattr(policy, name):
            return replace(policy, **{name: new})
    return policy


def winner_rule_search(
    config: SearchConfig,
    evaluator: Callable[[CloudPolicy, int], tuple[float, float]] | None = None,
) -> SearchState:
    """Randomized winner's rule over cloud parameters.

    Each round runs a batch under the current strategy.  If the batch
    mean beats the reference U the strategy is kept; otherwise a fair
    coin decides between repeating it and perturbing exactly one
    parameter.  ``evaluator`` may replace the Monte Carlo batch (used by
    the synthetic-environment tests); it receives (policy, round).
    """
    if config.rounds < 1:
        raise ValueError("rounds must be >= 1")
    batch = 1 if config.single_run else config.batch
    if evaluator is None:

        def evaluator(policy: CloudPolicy, r: int) -> tuple[float, float]:
            return evaluate_batch(
                policy, config.n, batch, rng.stream(config.seed, "round", r).integers(2**31)
            )

    coin = rng.stream(config.seed, "winner-coin")
    current = config.start
    best = current
    best_value = math.inf
    history: list[RoundRecord] = []
    for r in range(config.rounds):
        mean, se = evaluator(current, r)
        if mean < best_value:
            best, best_value = current, mean
        if mean < config.u_reference:
            action = "kept-win"
        elif coin.random() < 0.5:
            action = "kept-coin"
        else:
            action = "perturbed"
        history.append(
            RoundRecord(round=r, policy=current, mean=mean, se=se, action=action)
        )
        if action == "perturbed":
            current = _perturb(current, config.scales, coin)
    return SearchState(
        current=current,
        best=best,
        best_value=best_value,
        history=history,
        baseline_u=config.u_reference,
    )
