"""Rooin's refinement of the AM-GM inequality and its prime specialisation.

For sorted non-negative ``x_1 <= ... <= x_n`` with means ``A_n`` and ``G_n``::

    A_n - G_n >= S = (1/n) sum_{k=2}^{n} A_{n-1}^{(n-k)/n} (x_n^{1/n} - A_{n-1}^{1/n})^k >= 0

Applied to the first n primes, with ``A_{n-1}`` replaced by the smaller
``p_{floor((n-1)/2)}`` and ``A_n`` by the Mandl-refinement bound
``p_n/2 - n/14``, the sum becomes Omega(n), which sharpens the AM-GM upper
bound on the primorial.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError
from .prime_core import PrimeTable
from .rigor import Interval, IntervalArray, Verdict, certify_le

_TRUNCATE_REL = 1e-30


@dataclass(frozen=True)
class AgmChain:
    n: int
    arithmetic_mean: Interval
    geometric_mean: Interval
    refinement_sum: Interval

    @property
    def gap(self) -> Interval:
        return self.arithmetic_mean - self.geometric_mean

    def refuted(self) -> bool:
        """True only if ``A - G >= S >= 0`` is certifiably false."""
        return (certify_le(self.refinement_sum, self.gap) == Verdict.FAILS
                or self.refinement_sum.hi < 0.0)


@dataclass(frozen=True)
class AgmChainBatch:
    n: int
    arithmetic_mean: IntervalArray
    geometric_mean: IntervalArray
    refinement_sum: IntervalArray

    @property
    def gap(self) -> IntervalArray:
        return self.arithmetic_mean - self.geometric_mean

    def refuted(self) -> np.ndarray:
        return ((certify_le(self.refinement_sum, self.gap) == Verdict.FAILS)
                | (self.refinement_sum.hi < 0.0))


def _column_sum(X: np.ndarray, stop: int) -> IntervalArray:
    total = IntervalArray(np.zeros(X.shape[0]), check=False)
    for j in range(stop):
        total = total + X[:, j]
    return total.nonneg()


def rooin_chain_batch(X) -> AgmChainBatch:
    """Means and refinement sum for every row of a 2-D array of sorted rows."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] == 0:
        raise DomainError("expected a non-empty 2-D array")
    if not np.all(np.isfinite(X)):
        raise DomainError("inputs must be finite")
    if np.any(X < 0):
        raise DomainError("inputs must be non-negative")
    if np.any(np.diff(X, axis=1) < 0):
        raise DomainError("rows must be sorted ascending")
    m, n = X.shape
    A = (_column_sum(X, n) / n).nonneg()

    positive = X[:, 0] > 0
    safe = np.where(X > 0, X, 1.0)
    logs = IntervalArray(np.zeros(m), check=False)
    for j in range(n):
        logs = logs + IntervalArray(safe[:, j]).log()
    G = (logs / n).exp()
    G = IntervalArray(np.where(positive, G.lo, 0.0), np.where(positive, G.hi, 0.0), check=False)

    if n == 1:
        S = IntervalArray(np.zeros(m), check=False)
        return AgmChainBatch(n, A, G, S)

    A_prev = (_column_sum(X, n - 1) / (n - 1)).nonneg()
    inv_n = Interval.from_fraction(Fraction(1, n))
    last = IntervalArray(X[:, -1])
    # x_n >= A_{n-1} exactly for sorted input, so the base is non-negative
    base = (last.pow(inv_n) - A_prev.pow(inv_n)).nonneg()
    S = IntervalArray(np.zeros(m), check=False)
    for k in range(2, n + 1):
        weight = A_prev.pow(Interval.from_fraction(Fraction(n - k, n)))  # 0**0 == 1
        S = S + weight * base.powi(k)
    S = (S / n).nonneg()
    return AgmChainBatch(n, A, G, S)


def rooin_chain(xs) -> AgmChain:
    """Certified ``A_n``, ``G_n`` and refinement sum ``S`` for one sorted vector."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 1 or xs.size == 0:
        raise DomainError("expected a non-empty 1-D sequence")
    batch = rooin_chain_batch(xs[None, :])
    return AgmChain(batch.n, batch.arithmetic_mean[0], batch.geometric_mean[0],
                    batch.refinement_sum[0])


# ---------------------------------------------------------------------------
# Omega(n) for the primes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OmegaValue:
    n: int
    omega: Interval
    omega_floor: Interval      # (p_n / 2n)(2^{1/n} - 1)^n, may underflow to [0, tiny]
    log_omega_floor: Interval  # never underflows; used for certified comparisons


def _mandl_mean_bound(p: int, n: int) -> Interval:
    return Interval.from_fraction(Fraction(7 * p - n, 14))


def omega_sum(n: int, p: int, weight_base: Interval) -> Interval:
    """``(1/n) sum_{k=2}^n w^{(n-k)/n} (p^{1/n} - (p/2 - n/14)^{1/n})^k``.

    Terms shrink geometrically by ``delta / w^{1/n}``; the sum runs from
    k = 2 upward and stops once a term drops below 1e-30 of the partial sum,
    adding the geometric bound on the remaining terms to the upper endpoint.
    """
    inv_n = Interval.from_fraction(Fraction(1, n))
    delta = (Interval.from_int(p).pow(inv_n) - _mandl_mean_bound(p, n).pow(inv_n)).nonneg()
    ratio = delta / weight_base.pow(inv_n)
    term = weight_base.pow(Interval.from_fraction(Fraction(n - 2, n))) * delta.powi(2)
    total = term
    k = 2
    while k < n:
        if term.hi <= _TRUNCATE_REL * total.lo and ratio.hi < 1.0:
            remaining = term * ratio / (1 - ratio)
            total = total + Interval(0.0, remaining.hi)
            break
        term = term * ratio
        total = total + term
        k += 1
    return total / n


def omega(n: int, table: PrimeTable) -> OmegaValue:
    if n < 10:
        raise DomainError("omega is defined for n >= 10")
    p = table.p(n)
    q = table.p((n - 1) // 2)
    value = omega_sum(n, p, Interval.from_int(q))
    log_floor = _log_omega_floor(n, p)
    return OmegaValue(n, value, log_floor.exp(), log_floor)


def omega_exact_mean(n: int, table: PrimeTable) -> Interval:
    """Omega(n) with the true prefix mean ``A_{n-1}`` in place of the Robin floor."""
    if n < 10:
        raise DomainError("omega is defined for n >= 10")
    mean = Interval.from_fraction(Fraction(table.sum_to(n - 1), n - 1))
    return omega_sum(n, table.p(n), mean)


def _log_omega_floor(n: int, p: int) -> Interval:
    inv_n = Interval.from_fraction(Fraction(1, n))
    step = (Interval(2.0).log() * inv_n).expm1()  # 2^{1/n} - 1 without cancellation
    return Interval.from_fraction(Fraction(p, 2 * n)).log() + n * step.log()


def omega_floor(n: int, p: int) -> Interval:
    return _log_omega_floor(n, p).exp()


# ---------------------------------------------------------------------------
# the three primorial upper bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UpperBounds:
    n: int
    agm: Interval       # n log(p_n/2 - n/14)
    omega: Interval     # n log(p_n/2 - n/14 - Omega(n))
    closed: Interval    # n log((p_n/2)(1 - (2^{1/n} - 1)^n / n) - n/14)
    omega_value: OmegaValue

    def ordering(self) -> Verdict:
        """Certified ``omega <= closed <= agm``.

        All three share the argument ``p_n/2 - n/14`` minus a subtracted term
        (Omega, its floor, and zero).  ``n log(.)`` is increasing, so the
        ordering reduces to ``0 < floor <= Omega``, checked in log space.
        """
        ov = self.omega_value
        if ov.omega.lo <= 0.0:
            return Verdict.UNDECIDED
        verdict = certify_le(ov.log_omega_floor, ov.omega.log())
        if verdict != Verdict.HOLDS:
            return verdict
        # the computed enclosures must not contradict the ordering either
        if self.omega.lo > self.closed.hi or self.closed.lo > self.agm.hi:
            return Verdict.FAILS
        return Verdict.HOLDS


def refined_upper_bounds(n: int, table: PrimeTable) -> UpperBounds:
    ov = omega(n, table)
    base = _mandl_mean_bound(table.p(n), n)
    arg_omega = base - ov.omega
    arg_closed = base - ov.omega_floor
    if arg_omega.lo <= 0.0 or arg_closed.lo <= 0.0:
        raise DomainError(f"nonpositive bound argument at n = {n}")
    return UpperBounds(n, n * base.log(), n * arg_omega.log(), n * arg_closed.log(), ov)


AGM_CSV_COLUMNS = (
    "n", "theta_lo", "theta_hi",
    "agm_lo", "agm_hi", "omega_bound_lo", "omega_bound_hi", "closed_lo", "closed_hi",
    "omega_lo", "omega_hi", "omega_floor_lo", "omega_floor_hi",
    "log_omega_floor_lo", "log_omega_floor_hi", "omega_mean_lo", "omega_mean_hi",
)


def agm_rows(a: int, b: int, table: PrimeTable, stride: int = 1):
    """Rows of (n, theta, three bounds, Omega, Omega floor, exact-mean Omega)."""
    for n in range(max(a, 10), b + 1, stride):
        ub = refined_upper_bounds(n, table)
        ov = ub.omega_value
        mean = omega_exact_mean(n, table)
        th = table.theta(n)
        yield (n, th.lo, th.hi, ub.agm.lo, ub.agm.hi, ub.omega.lo, ub.omega.hi,
               ub.closed.lo, ub.closed.hi, ov.omega.lo, ov.omega.hi,
               ov.omega_floor.lo, ov.omega_floor.hi,
               ov.log_omega_floor.lo, ov.log_omega_floor.hi, mean.lo, mean.hi)


def write_agm_csv(rows, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(AGM_CSV_COLUMNS)
    for row in rows:
        writer.writerow([row[0]] + [repr(v) for v in row[1:]])
