"""Theorem tables, witness cache, verification and the command line."""

from .cache import CacheEntry, WitnessCache, default_cache
from .tables import Interval, TheoremTable, Unspecified, conjectured_seven_wide, expected_value
from .verify import VerifyReport, run_conjecture_experiment, verify_theorem

__all__ = [
    "CacheEntry",
    "Interval",
    "TheoremTable",
    "Unspecified",
    "VerifyReport",
    "WitnessCache",
    "conjectured_seven_wide",
    "default_cache",
    "expected_value",
    "run_conjecture_experiment",
    "verify_theorem",
]
