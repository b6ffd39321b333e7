"""rankstop: a laboratory for expected-rank minimisation in sequential
selection, with exact small-n optima, memoryless threshold families,
cloud-override policy search, a Poisson-embedded continuous-time
formulation, and an interactive human-vs-machine selection game."""

from . import cloud, core, exact_dp, memoryless, namur, ode, poisson
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "cloud",
    "core",
    "exact_dp",
    "memoryless",
    "namur",
    "ode",
    "poisson",
]
