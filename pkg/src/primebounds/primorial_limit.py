"""The p_n-th root of the primorial and its convergence to e.

``root(n) = (p_1 ... p_n)^{1/p_n} = exp(theta(p_n) / p_n)`` tends to e.  The
explicit band ``|theta(x) - x| < d x / log^4 x`` gives

    1 - d/log^4(n log n) < root(n)/e < 1 + d/log^4(n log n) + d^2 / (2 log^4(n log n)(log^4(n log n) - d))

where the upper form needs ``log^4 > d``, i.e. ``p_n > exp(d^{1/4})``.  At
desk scale the band is vacuous; the code here evaluates it honestly and
reports where it applies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .analytic import D_THETA
from .errors import DomainError, IndexOutOfRange
from .prime_core import PrimeTable
from .rigor import Interval, IntervalArray, Verdict, certify_less

E = Interval(1.0).exp()

CONVERGENCE_COLUMNS = ("n", "p_n", "theta_lo", "theta_hi", "ratio_lo", "ratio_hi",
                       "root_lo", "root_hi", "band_lo", "band_hi", "band_valid")


def primorial_root(n: int, table: PrimeTable) -> Interval:
    """Certified ``exp(theta(p_n) / p_n)``."""
    return (table.theta(n) / table.p(n)).exp()


# ---------------------------------------------------------------------------
# the explicit band
# ---------------------------------------------------------------------------

def _band_lower(log4):
    return E * (1 - D_THETA / log4)


def _band_upper(log4):
    # needs log4 > d
    t = D_THETA / log4
    return E * (1 + t + D_THETA * D_THETA / (2 * log4 * (log4 - D_THETA)))


@dataclass(frozen=True)
class Band:
    n: int
    lower: Interval
    upper: Optional[Interval]  # None when log^4(n log n) <= d is not ruled out
    valid: bool


def _from_mp(value) -> Interval:
    """Outward double enclosure of an mpmath interval."""
    return Interval(math.nextafter(float(value.a), -math.inf), math.nextafter(float(value.b), math.inf))


def _mp_log4_floor(n: int, prec: int = 200):
    ctx = mpmath.iv
    old = ctx.prec
    ctx.prec = prec
    try:
        nn = ctx.mpf(n)
        log4 = ctx.log(nn * ctx.log(nn)) ** 4
        upper = None
        if log4.a > D_THETA:
            t = D_THETA / log4
            upper = ctx.e * (1 + t + D_THETA * D_THETA / (2 * log4 * (log4 - D_THETA)))
        return log4, upper
    finally:
        ctx.prec = old


def band_simple(n: int) -> Band:
    """Band for ``root(n)`` with ``p_n`` replaced by its floor ``n log n``.

    Near the validity boundary double intervals cannot separate ``log^4`` from
    d; there the flag and the upper form come from 200-bit mpmath intervals.
    """
    if n < 2:
        raise DomainError("band_simple needs n >= 2")
    nn = Interval.from_int(n)
    log4 = (nn * nn.log()).log().powi(4)
    verdict = certify_less(Interval.from_int(D_THETA), log4)
    if verdict == Verdict.UNDECIDED:
        mp_log4, mp_upper = _mp_log4_floor(n)
        if mp_log4.b <= D_THETA:
            return Band(n, _band_lower(log4), None, False)
        if mp_upper is None:
            raise ArithmeticError(f"cannot decide log^4(n log n) > d at n = {n}")
        return Band(n, _band_lower(log4), _from_mp(mp_upper), True)
    valid = verdict == Verdict.HOLDS
    return Band(n, _band_lower(log4), _band_upper(log4) if valid else None, valid)


def band_threshold(prec: int = 200) -> tuple:
    """Rigorous enclosure ``(lo, hi)`` of ``exp(d^{1/4})`` as mpmath numbers.

    The boundary sits near 5.27e15, where consecutive integers differ in
    ``log^4`` by about 4e-11 absolute, far below double resolution, so this
    uses mpmath's interval context.
    """
    ctx = mpmath.iv
    old = ctx.prec
    ctx.prec = prec
    try:
        value = ctx.exp(ctx.sqrt(ctx.sqrt(ctx.mpf(D_THETA))))
        return value.a, value.b
    finally:
        ctx.prec = old


def smallest_valid_prime_bound(prec: int = 200) -> int:
    """Least integer ``p`` with ``log^4 p > d``."""
    lo, hi = band_threshold(prec)
    floor_lo, floor_hi = int(mpmath.floor(lo)), int(mpmath.floor(hi))
    if floor_lo != floor_hi:
        raise ArithmeticError("threshold enclosure straddles an integer; raise prec")
    return floor_lo + 1


def band_valid_at(p: int) -> bool:
    """Certified ``log^4 p > d``: double intervals first, mpmath intervals if undecided."""
    if p <= 1:
        return False
    verdict = certify_less(Interval.from_int(D_THETA), Interval.from_int(p).log().powi(4))
    if verdict != Verdict.UNDECIDED:
        return verdict == Verdict.HOLDS
    ctx = mpmath.iv
    old = ctx.prec
    ctx.prec = 200
    try:
        diff = ctx.log(ctx.mpf(p)) ** 4 - D_THETA
        if diff.a > 0:
            return True
        if diff.b <= 0:
            return False
        raise ArithmeticError(f"cannot decide log^4({p}) > d at 200 bits")
    finally:
        ctx.prec = old


# ---------------------------------------------------------------------------
# exponential lemma
# ---------------------------------------------------------------------------

def _exp_remainder(s: Interval) -> Interval:
    """``exp(s) - 1 - s = sum_{k>=2} s^k / k!`` for ``|s| < 1``, without cancellation."""
    mag = max(abs(s.lo), abs(s.hi))
    term = s.powi(2) / 2
    total = term
    k = 2
    while True:
        k += 1
        term = term * s / k
        total = total + term
        if max(abs(term.lo), abs(term.hi)) <= 2.0**-70 * max(abs(total.lo), abs(total.hi)) or k > 200:
            break
    # |s|^{k+1}/(k+1)! * sum_j (|s|/(k+2))^j bounds every omitted term
    first_omitted = (Interval(mag).powi(k + 1) / math.factorial(k + 1)).hi
    tail = first_omitted / (1 - mag / (k + 2))
    return total + Interval(-math.nextafter(tail, math.inf), math.nextafter(tail, math.inf))


@dataclass(frozen=True)
class ExpBand:
    t: Interval
    lower: Interval          # 1 - t, below exp(-t)
    upper: Interval          # 1 + t + t^2 / (2(1 - t)), above exp(t)
    lower_verdict: Verdict   # certified exp(-t) > 1 - t
    upper_verdict: Verdict   # certified exp(t) < upper


def exp_band_lemma(t) -> ExpBand:
    t = Interval.coerce(t)
    if not (0.0 < t.lo and t.hi < 1.0):
        raise DomainError(f"exp_band_lemma needs t inside (0, 1), got {t!r}")
    lower = 1 - t
    slack = t.powi(2) / (2 * (1 - t))
    upper = 1 + t + slack
    # exp(-t) - (1 - t) = R(-t)
    lower_verdict = certify_less(Interval(0.0), _exp_remainder(-t))
    # upper - exp(t) = sum_{k>=3} t^k (1/2 - 1/k!), every term positive, so >= t^3/3
    upper_verdict = certify_less(Interval(0.0), t.powi(3) / 3)
    if upper_verdict != Verdict.HOLDS:
        upper_verdict = certify_less(_exp_remainder(t), slack)
    return ExpBand(t, lower, upper, lower_verdict, upper_verdict)


# ---------------------------------------------------------------------------
# convergence table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergencePoint:
    n: int
    p_n: int
    theta: Interval
    ratio: Interval
    primorial_root: Interval
    band_lo: Optional[Interval]
    band_hi: Optional[Interval]
    band_valid: bool
    ratio_increased: Optional[bool]  # observation against the previous row, not a theorem

    def csv_row(self) -> list:
        return [
            self.n, self.p_n,
            repr(self.theta.lo), repr(self.theta.hi),
            repr(self.ratio.lo), repr(self.ratio.hi),
            repr(self.primorial_root.lo), repr(self.primorial_root.hi),
            "" if self.band_lo is None else repr(self.band_lo.lo),
            "" if self.band_hi is None else repr(self.band_hi.hi),
            int(self.band_valid),
        ]


@dataclass(frozen=True)
class ConvergenceColumns:
    """Columnar form of a convergence table; band entries are NaN where absent."""

    n: np.ndarray
    p_n: np.ndarray
    theta: IntervalArray
    ratio: IntervalArray
    root: IntervalArray
    band_lo: IntervalArray
    band_hi: IntervalArray
    band_valid: np.ndarray


def convergence_columns(n_max: int, stride: int, table: PrimeTable) -> ConvergenceColumns:
    if stride < 1:
        raise DomainError("stride must be >= 1")
    if n_max > table.count:
        raise IndexOutOfRange(f"n_max = {n_max} exceeds table of {table.count} primes")
    ns = np.arange(stride, n_max + 1, stride, dtype=np.int64)
    ps = table.primes[ns - 1]
    theta = IntervalArray(table.theta_lo[ns], table.theta_hi[ns], check=False)
    ratio = theta / IntervalArray.from_values(ps)
    root = ratio.exp()

    lower = [np.full(ns.size, np.nan), np.full(ns.size, np.nan)]
    upper = [np.full(ns.size, np.nan), np.full(ns.size, np.nan)]
    valid = np.zeros(ns.size, dtype=bool)
    banded = np.flatnonzero(ns >= 2)
    if banded.size:
        nb = IntervalArray.from_values(ns[banded])
        log4 = (nb * nb.log()).log().powi(4)
        low = _band_lower(log4)
        lower[0][banded], lower[1][banded] = low.lo, low.hi
        ok = log4.lo > D_THETA
        valid[banded] = ok
        if ok.any():
            high = _band_upper(IntervalArray(log4.lo[ok], log4.hi[ok], check=False))
            upper[0][banded[ok]], upper[1][banded[ok]] = high.lo, high.hi
    return ConvergenceColumns(ns, ps, theta, ratio, root,
                              IntervalArray(*lower, check=False),
                              IntervalArray(*upper, check=False), valid)


def _maybe(lo: float, hi: float) -> Optional[Interval]:
    return None if math.isnan(lo) else Interval(lo, hi)


def convergence_table(n_max: int, stride: int, table: PrimeTable) -> list[ConvergencePoint]:
    """Rows at ``n = stride, 2 stride, ... <= n_max``."""
    cols = convergence_columns(n_max, stride, table)
    points = []
    prev = None
    for i, n in enumerate(cols.n.tolist()):
        r = cols.ratio[i]
        increased = None
        if prev is not None:
            if r.lo > prev.hi:
                increased = True
            elif r.hi < prev.lo:
                increased = False
        prev = r
        points.append(ConvergencePoint(
            n, int(cols.p_n[i]), cols.theta[i], r, cols.root[i],
            _maybe(cols.band_lo.lo[i], cols.band_lo.hi[i]),
            _maybe(cols.band_hi.lo[i], cols.band_hi.hi[i]),
            bool(cols.band_valid[i]), increased,
        ))
    return points


def write_convergence_csv(points, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CONVERGENCE_COLUMNS)
    for pt in points:
        writer.writerow(pt.csv_row())
