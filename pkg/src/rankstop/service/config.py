"""Flat key-value service configuration.

Example file::

    bind = 127.0.0.1:8732
    data_dir = ./namur-data
    default_m = 60
    basket_file =
    master_seed = 12345
    session_ttl_seconds = 3600
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..namur.basket import DistributionBasket, default_basket


@dataclass(frozen=True)
class ServiceConfig:
    bind: str = "127.0.0.1:8732"
    data_dir: str = "./namur-data"
    default_m: int = 60
    basket_file: str = ""
    master_seed: int = 12345
    session_ttl_seconds: int = 3600

    def __post_init__(self):
        if self.session_ttl_seconds <= 0:
            raise ValueError("session TTL must be positive")

    def basket(self) -> DistributionBasket:
        if self.basket_file:
            return DistributionBasket.from_json(Path(self.basket_file).read_text())
        return default_basket()

    @property
    def host(self) -> str:
        return self.bind.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.bind.rsplit(":", 1)[1])


def parse_config(path: str | Path) -> ServiceConfig:
    fields = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    kwargs = {}
    if "bind" in fields:
        kwargs["bind"] = fields["bind"]
    if "data_dir" in fields:
        kwargs["data_dir"] = fields["data_dir"]
    if "default_m" in fields:
        kwargs["default_m"] = int(fields["default_m"])
    if "basket_file" in fields:
        kwargs["basket_file"] = fields["basket_file"]
    if "master_seed" in fields:
        kwargs["master_seed"] = int(fields["master_seed"])
    if "session_ttl_seconds" in fields:
        kwargs["session_ttl_seconds"] = int(fields["session_ttl_seconds"])
    return ServiceConfig(**kwargs)
