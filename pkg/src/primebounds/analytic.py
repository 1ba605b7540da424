"""Explicit analytic functions and constants used by the prime inequalities.

All functions accept a Python number, an :class:`Interval`, or a numpy array
(returning an :class:`IntervalArray`), so the same code serves single-point
evaluation and the vectorised sweeps.  Decimal constants such as 1.2762 are
not binary fractions; they enter as the tightest enclosing intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .rigor import Interval, IntervalArray, Verdict, certify_less

# 30-digit literal, widened one ulp each way
_GAMMA_F = float("0.577215664901532860606512090082")
EULER_GAMMA = Interval(np.nextafter(_GAMMA_F, -np.inf), np.nextafter(_GAMMA_F, np.inf))

D_THETA = 1717433  # |theta(x) - x| < d x / log^4 x
C_APPROX = -47.06746

MANDL_GAP_COEFF = "0.1119"
MANDL_GAP_COEFF_ALT = "0.0119"

_DUSART_UPPER = Interval.from_decimal("1.2762")
_PANAITOPOL_SHIFT = Interval.from_decimal("0.4")
_ROBIN_SHIFT = Interval.from_decimal("2.1454")
_RATIO_CUBIC = Interval.from_decimal("1.7454")
_RATIO_SQUARE = Interval.from_decimal("1.4")
_LOG_X_FLOOR = Interval.from_decimal("1.85")


def _lift(x):
    return IntervalArray.coerce(x)


def _require(cond, message: str):
    if not np.all(cond):
        raise DomainError(message)


# ---------------------------------------------------------------------------
# logarithmic integral and the constant c
# ---------------------------------------------------------------------------

def li(x, rel_tol: float = 1e-12) -> Interval:
    """Enclosure of the logarithmic integral Li(x) for x > 1.

    Uses the Ramanujan-Soldner style series
    ``gamma + log log x + sum_k (log x)^k / (k k!)``.  All series terms are
    positive; summation stops once ``k > 2 log x`` and the current term is
    below ``rel_tol`` of the partial sum, and the geometric tail bound is
    added to the upper endpoint.
    """
    x = Interval.coerce(x)
    if x.lo <= 1.0:
        raise DomainError(f"li needs x > 1, got {x!r}")
    L = x.log()
    series = Interval(0.0)
    term = L
    k = 1
    while True:
        series = series + term
        if k > 2.0 * L.hi and term.hi <= rel_tol * series.lo:
            break
        k += 1
        # L^k/(k k!) = L^(k-1)/((k-1)(k-1)!) * L (k-1) / k^2
        term = term * L * (k - 1) / (k * k)
    ratio = L / (k + 1)  # bounds every later term ratio, and is < 1/2 here
    tail = term * ratio / (1 - ratio)
    series = series + Interval(0.0, tail.hi)
    return EULER_GAMMA + L.log() + series


def constant_c() -> Interval:
    """``c = 35995 - 3 Li(599^2) + 599^2 / log 599`` (about -47.0675)."""
    square = 599 * 599
    return 35995 - 3 * li(square) + Interval.from_int(square) / Interval(599.0).log()


@dataclass(frozen=True)
class Constants:
    c: Interval
    d: int
    euler_gamma: Interval


def constants() -> Constants:
    return Constants(constant_c(), D_THETA, EULER_GAMMA)


# ---------------------------------------------------------------------------
# explicit bounds for pi(x), p_n and theta
# ---------------------------------------------------------------------------

def dusart_pi_lower(x):
    """``(x / log x)(1 + 1/log x)``, a lower bound for pi(x) when x >= 599."""
    x = _lift(x)
    _require(x.lo > 1.0, "dusart_pi_lower needs x > 1")
    L = x.log()
    return x / L * (1 + 1 / L)


def dusart_pi_upper(x):
    """``(x / log x)(1 + 1.2762/log x)``, an upper bound for pi(x) when x >= 2."""
    x = _lift(x)
    _require(x.lo > 1.0, "dusart_pi_upper needs x > 1")
    L = x.log()
    return x / L * (1 + _DUSART_UPPER / L)


def pn_floor(n):
    """``n log n``; p_n exceeds it for every n >= 1."""
    n = _lift(n)
    _require(n.lo >= 1.0, "pn_floor needs n >= 1")
    return n * n.log()


def rosser_pn_bounds(n):
    """``(n log n, n(log n + log log n))``, valid bracket for p_n when n >= 6."""
    n = _lift(n)
    _require(n.lo >= 6.0, "rosser_pn_bounds needs n >= 6")
    L = n.log()
    return n * L, n * (L + L.log())


def logpn1_upper(n):
    """``log n + log log n + (log log n - 0.4)/log n``; bounds log p_{n+1} from n = 53."""
    n = _lift(n)
    _require(n.lo >= 2.0, "logpn1_upper needs n >= 2")
    L = n.log()
    LL = L.log()
    return L + LL + (LL - _PANAITOPOL_SHIFT) / L


def theta_lower_robin(n):
    """``n(log n + log log n - 1 + (log log n - 2.1454)/log n)``, below theta(p_n) for n >= 3."""
    n = _lift(n)
    _require(n.lo >= 3.0, "theta_lower_robin needs n >= 3")
    L = n.log()
    LL = L.log()
    return n * (L + LL - 1 + (LL - _ROBIN_SHIFT) / L)


def theta_band(x):
    """``(x - d x / log^4 x, x + d x / log^4 x)``, the explicit band around theta(x)."""
    x = _lift(x)
    _require(x.lo > 1.0, "theta_band needs x > 1")
    spread = D_THETA * x / x.log().powi(4)
    return x - spread, x + spread


# ---------------------------------------------------------------------------
# pieces of the product-bound proofs
# ---------------------------------------------------------------------------

def prlb_ratio(x):
    """``(1.7454 x^3 + 1.4 x^2 - 0.4) / (x^3 + x^2 - x - 1)`` for x > 1."""
    x = _lift(x)
    _require(x.lo > 1.0, "prlb_ratio needs x > 1")
    x2 = x.powi(2)
    x3 = x.powi(3)
    # x^3 + x^2 - x - 1 = (x - 1)(x + 1)^2 keeps the denominator's sign exact
    denom = (x - 1) * (x + 1).powi(2)
    return (_RATIO_CUBIC * x3 + _RATIO_SQUARE * x2 - _PANAITOPOL_SHIFT) / denom


def prlb_ratio_facts(x) -> tuple:
    """The two facts the lower-bound proof rests on, certified at ``x``.

    Returns ``(ratio < 1.7454, log x > 1.85)`` as verdicts; both are claimed
    for ``x >= log 599``.
    """
    x = _lift(x)
    return certify_less(prlb_ratio(x), _RATIO_CUBIC), certify_less(_LOG_X_FLOOR, x.log())


def prlb_proof_sides(n):
    """Left and right sides of the n-form inequality behind the refined lower bound.

    The left side is ``(1 - a/L - a/L^2)(L + LL + (LL - 0.4)/L)`` with
    ``a = 1 - 1/L``; the right side is ``L + LL - 1 + (LL - 2.1454)/L``.
    """
    n = _lift(n)
    _require(n.lo >= 3.0, "prlb_proof_sides needs n >= 3")
    L = n.log()
    LL = L.log()
    a = 1 - 1 / L
    lhs = (1 - a / L - a / L.powi(2)) * (L + LL + (LL - _PANAITOPOL_SHIFT) / L)
    rhs = L + LL - 1 + (LL - _ROBIN_SHIFT) / L
    return lhs, rhs


# ---------------------------------------------------------------------------
# the analytic crossover in the Mandl refinement
# ---------------------------------------------------------------------------

def refined_gap_minorant(n, coefficient: str = MANDL_GAP_COEFF, c: Interval | None = None):
    """``c + coefficient (n log n)^2 / log^2(n(log n + log log n))``."""
    n = _lift(n)
    _require(n.lo >= 6.0, "refined_gap_minorant needs n >= 6")
    if c is None:
        c = constant_c()
    coef = Interval.coerce(coefficient)
    low, high = rosser_pn_bounds(n)
    return c + coef * low.powi(2) / high.log().powi(2)


def gap_target(n):
    """``n^2 / 14``."""
    n = _lift(n)
    return n.powi(2) / 14


@dataclass(frozen=True)
class GapCrossover:
    coefficient: str
    search_limit: int
    first_holds: int | None
    stable_from: int | None
    undecided: list = field(default_factory=list)
    # coefficient < 1/14 forces minorant < n^2/14 for every n >= 6
    never_crosses: bool = False


def gap_crossover(coefficient: str = MANDL_GAP_COEFF, search_limit: int = 100_000,
                  chunk: int = 1 << 16) -> GapCrossover:
    """First and stable index where the minorant certifiably exceeds n^2/14."""
    c = constant_c()
    coef = Interval.coerce(coefficient)
    # for n >= 6, log n < log(n(log n + log log n)), so the ratio factor is < 1
    never = certify_less(coef, Interval(1.0) / 14) == Verdict.HOLDS
    first = None
    last_bad = 5
    undecided = []
    for start in range(6, search_limit + 1, chunk):
        ns = np.arange(start, min(start + chunk, search_limit + 1), dtype=np.int64)
        verdicts = certify_less(gap_target(ns), refined_gap_minorant(ns, coefficient, c))
        holds = verdicts == Verdict.HOLDS
        if first is None and holds.any():
            first = int(ns[np.argmax(holds)])
        bad = np.flatnonzero(~holds)
        if bad.size:
            last_bad = int(ns[bad[-1]])
        undecided.extend(ns[verdicts == Verdict.UNDECIDED].tolist())
    stable = last_bad + 1 if last_bad < search_limit else None
    return GapCrossover(coefficient, search_limit, first, stable, undecided, never)
