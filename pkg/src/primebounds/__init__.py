"""Certified numerical checks of explicit inequalities for the primes.

Prime tables with exact prefix sums, interval arithmetic with outward
rounding, the analytic bound functions, a catalog of inequalities with
range verification and crossover search, the Rooin AM-GM refinement, and
the convergence of the primorial root to e.
"""

from .errors import (
    CapExceeded,
    CorruptCache,
    DomainError,
    IndexOutOfRange,
    IntervalDivisionError,
    IntervalOverflow,
    PrimeBoundsError,
    ResourceExhausted,
    TableTooSmall,
    UnknownInequality,
)
from .prime_core import (
    EuclidNumber,
    PrimeTable,
    build_table,
    euclid_number,
    load_cache,
    pi_of,
    primorial_exact,
    save_cache,
    theta_of,
)
from .rigor import Interval, IntervalArray, Verdict, certify_le, certify_less

__version__ = "0.1.0"

__all__ = [
    "CapExceeded",
    "CorruptCache",
    "DomainError",
    "EuclidNumber",
    "IndexOutOfRange",
    "Interval",
    "IntervalArray",
    "IntervalDivisionError",
    "IntervalOverflow",
    "PrimeBoundsError",
    "PrimeTable",
    "ResourceExhausted",
    "TableTooSmall",
    "UnknownInequality",
    "Verdict",
    "build_table",
    "certify_le",
    "certify_less",
    "euclid_number",
    "load_cache",
    "pi_of",
    "primorial_exact",
    "save_cache",
    "theta_of",
]
