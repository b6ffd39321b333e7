"""Finite baskets of continuous arrival-time distributions.

A game hides one CDF from a named finite basket on a common interval
[a, b]; players infer it online from the arrival times alone.  Three
parametric families cover the shipped baskets: uniform, power ramps
z^k, and truncated exponentials.  Every entry exposes its CDF, density,
and an inverse-transform sampler.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FAMILIES = ("uniform", "power", "truncexp")


@dataclass(frozen=True)
class CdfEntry:
    name: str
    family: str
    params: dict = field(default_factory=dict)
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.a < self.b:
            raise ValueError("bounds must satisfy a < b")
        if self.family == "power" and self.params.get("k", 1.0) <= 0:
            raise ValueError("power family needs k > 0")
        if self.family == "truncexp" and self.params.get("rate", 1.0) == 0:
            raise ValueError("truncexp family needs a nonzero rate")

    def _z(self, u):
        return np.clip((np.asarray(u, dtype=np.float64) - self.a) / (self.b - self.a), 0.0, 1.0)

    def cdf(self, u):
        z = self._z(u)
        if self.family == "uniform":
            return z
        if self.family == "power":
            return z ** self.params["k"]
        lam = self.params["rate"]
        return (1.0 - np.exp(-lam * z)) / (1.0 - math.exp(-lam))

    def pdf(self, u):
        z = self._z(u)
        w = self.b - self.a
        if self.family == "uniform":
            return np.ones_like(z) / w
        if self.family == "power":
            k = self.params["k"]
            return k * z ** (k - 1.0) / w
        lam = self.params["rate"]
        return lam * np.exp(-lam * z) / (1.0 - math.exp(-lam)) / w

    def sample(self, gen: np.random.Generator, size: int):
        u = gen.random(size)
        if self.family == "uniform":
            z = u
        elif self.family == "power":
            z = u ** (1.0 / self.params["k"])
        else:
            lam = self.params["rate"]
            z = -np.log1p(-u * (1.0 - math.exp(-lam))) / lam
        return self.a + (self.b - self.a) * z


@dataclass(frozen=True)
class DistributionBasket:
    entries: tuple[CdfEntry, ...]
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if not self.entries:
            raise ValueError("basket must be nonempty")
        for e in self.entries:
            if e.a != self.a or e.b != self.b:
                raise ValueError("all basket entries must share the basket bounds")

    def __len__(self) -> int:
        return len(self.entries)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def to_json(self) -> str:
        return json.dumps(
            {
                "a": self.a,
                "b": self.b,
                "entries": [
                    {"name": e.name, "family": e.family, "params": e.params}
                    for e in self.entries
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DistributionBasket":
        d = json.loads(text)
        a, b = float(d.get("a", 0.0)), float(d.get("b", 1.0))
        entries = tuple(
            CdfEntry(name=e["name"], family=e["family"],
                     params=dict(e.get("params", {})), a=a, b=b)
            for e in d["entries"]
        )
        return cls(entries=entries, a=a, b=b)


def default_basket() -> DistributionBasket:
    return DistributionBasket(
        entries=(
            CdfEntry(name="uniform", family="uniform"),
            CdfEntry(name="ramp2", family="power", params={"k": 2.0}),
            CdfEntry(name="early3", family="truncexp", params={"rate": 3.0}),
        )
    )
