"""The Namur selection game: timed arrivals from a hidden basket CDF with
hidden count, relative-rank display, online inference, machine play, and
secret-objective identification."""

from .basket import CdfEntry, DistributionBasket, default_basket
from .compat import CompatibilityLedger, ObjectiveHypothesis, update_compatibility
from .inference import (
    count_posterior,
    fit_distribution,
    integrated_squared_distance,
    joint_belief,
    posterior_median_count,
)
from .objectives import (
    EXACT_RANK,
    TOP_PERCENT,
    Objective,
    ThresholdTable,
    build_toppct_table,
    load_default_table,
    machine_decide,
)
from .session import ACCEPTED, EXHAUSTED, OPEN, Session, new_session, replay

__all__ = [
    "ACCEPTED",
    "CdfEntry",
    "CompatibilityLedger",
    "DistributionBasket",
    "EXACT_RANK",
    "EXHAUSTED",
    "OPEN",
    "Objective",
    "ObjectiveHypothesis",
    "Session",
    "ThresholdTable",
    "TOP_PERCENT",
    "build_toppct_table",
    "count_posterior",
    "default_basket",
    "fit_distribution",
    "integrated_squared_distance",
    "joint_belief",
    "load_default_table",
    "machine_decide",
    "new_session",
    "posterior_median_count",
    "replay",
    "update_compatibility",
]
