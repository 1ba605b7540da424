"""Registry of the prime inequalities, with range verification and crossover search.

Each entry evaluates a whole block of indices at once.  Integer inequalities
(Mandl and friends) are decided exactly in int64 after clearing
denominators.  Product inequalities compare ``theta(p_n)`` against a log-scale
right side with interval arithmetic; where the right side is an integer
expression they also have an exact big-integer form, used for every
``n <= product_cap`` and as a fallback whenever the interval comparison is
undecided.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from . import analytic
from .agm import refined_upper_bounds
from .errors import DomainError, TableTooSmall, UnknownInequality
from .prime_core import DEFAULT_PRODUCT_CAP, PrimeTable, _product, pi_many
from .rigor import Interval, IntervalArray, Verdict, certify_le, certify_less

_INT64_SAFE = 2**62
_FLOAT_EXACT = 2**53


class Kind(Enum):
    EXACT_INTEGER = "exact_integer"
    INTERVAL_REAL = "interval_real"


BatchFn = Callable[[np.ndarray, PrimeTable], np.ndarray]
ExactFn = Callable[[int, PrimeTable, int], bool]


@dataclass(frozen=True)
class InequalityDef:
    id: str
    description: str
    domain_min: int
    claimed_from: Optional[int]
    kind: Kind
    cites: str
    batch: BatchFn = field(repr=False)
    # exact(n, table, primorial) for product inequalities with an integer right side
    exact: Optional[ExactFn] = field(default=None, repr=False)
    lookahead: int = 0  # table must hold p_{n + lookahead}

    def __post_init__(self):
        if self.claimed_from is not None and self.claimed_from < self.domain_min:
            raise ValueError(f"{self.id}: claimed_from below domain_min")


# ---------------------------------------------------------------------------
# helpers shared by the batch predicates
# ---------------------------------------------------------------------------

def _p(table: PrimeTable, idx: np.ndarray) -> np.ndarray:
    return table.primes[idx - 1]


def _theta(table: PrimeTable, ns: np.ndarray) -> IntervalArray:
    return IntervalArray(table.theta_lo[ns], table.theta_hi[ns], check=False)


def _ints(*arrays: np.ndarray, bound: int) -> tuple:
    # promote to Python ints when an int64 expression could overflow
    if bound < _INT64_SAFE:
        return arrays
    return tuple(a.astype(object) for a in arrays)


def _iv(values: np.ndarray) -> IntervalArray:
    if values.dtype == object or (values.size and int(np.max(np.abs(values))) > _FLOAT_EXACT):
        return IntervalArray.from_values(np.asarray(values, dtype=object))
    return IntervalArray.from_values(values)


def _from_bool(mask) -> np.ndarray:
    return np.where(np.asarray(mask, dtype=bool), Verdict.HOLDS, Verdict.FAILS).astype(np.int8)


def _const(text: str) -> Interval:
    return Interval.from_decimal(text)


@lru_cache(maxsize=None)
def _c() -> Interval:
    return analytic.constant_c()


# ---------------------------------------------------------------------------
# predicates
# ---------------------------------------------------------------------------

def _mandl(ns, table):
    p, s = _p(table, ns), table.prefix_sum[ns]
    n, p, s = _ints(ns, p, s, bound=2 * int(s.max()) + int(ns.max()) * int(p.max()))
    return _from_bool(2 * s < n * p)


def _mandl_refined(ns, table):
    p, s = _p(table, ns), table.prefix_sum[ns]
    nmax = int(ns.max())
    n, p, s = _ints(ns, p, s, bound=28 * int(s.max()) + 14 * nmax * int(p.max()) + 2 * nmax * nmax)
    # sum < (n/2) p - n^2/14  <=>  28 sum < 14 n p - 2 n^2
    return _from_bool(28 * s < 14 * n * p - 2 * n * n)


def _gap(ns, table):
    p, s = _p(table, ns), table.prefix_sum[ns]
    n, p, s = _ints(ns, p, s, bound=int(ns.max()) * int(p.max()) + 2 * int(s.max()))
    return n * p - s, n * p - 2 * s


def _integral_gap(ns, table):
    full, _ = _gap(ns, table)
    p = _iv(_p(table, ns))
    L = p.log()
    rhs = _c() + p.powi(2) / (2 * L) * (1 + 3 / (2 * L))
    return certify_le(rhs, _iv(np.asarray(full)))


def _half_gap(ns, table):
    _, twice_half = _gap(ns, table)
    p = _iv(_p(table, ns))
    rhs = _c() + _const(analytic.MANDL_GAP_COEFF) * p.powi(2) / p.log().powi(2)
    return certify_le(rhs, _iv(np.asarray(twice_half)) / 2)


def _log_next(ns, table) -> IntervalArray:
    return _iv(_p(table, ns + 1)).log()


def _power_of_next(k: int):
    def batch(ns, table):
        return certify_less(k * _log_next(ns, table), _theta(table, ns))

    def exact(n, table, prod):
        return prod > table.p(n + 1) ** k

    return batch, exact


def _sandor_rhs(ns, table):
    a, b = _p(table, ns + 5), _p(table, ns // 2)
    a, b = _ints(a, b, bound=2 * int(a.max()) ** 2)
    return a * a + b * b


def _sandor(ns, table):
    return certify_less(_iv(np.asarray(_sandor_rhs(ns, table))).log(), _theta(table, ns))


def _sandor_exact(n, table, prod):
    return prod > table.p(n + 5) ** 2 + table.p(n // 2) ** 2


def _panaitopol(ns, table):
    k = ns - pi_many(table, ns)
    return certify_less(_iv(k) * _log_next(ns, table), _theta(table, ns))


def _panaitopol_exact(n, table, prod):
    k = n - int(pi_many(table, np.array([n]))[0])
    return prod > table.p(n + 1) ** k


def _panaitopol_refined(ns, table):
    k = ns - pi_many(table, ns)
    n = _iv(ns)
    exponent = (1 - 1 / n.log()) * _iv(k)
    return certify_less(exponent * _log_next(ns, table), _theta(table, ns))


def _agm_upper(ns, table):
    half = _iv(_p(table, ns)) / 2
    return certify_less(_theta(table, ns), _iv(ns) * half.log())


def _agm_upper_exact(n, table, prod):
    return (prod << n) < table.p(n) ** n


def _agm_upper_refined(ns, table):
    arg = _iv(7 * _p(table, ns) - ns) / 14
    return certify_less(_theta(table, ns), _iv(ns) * arg.log())


def _agm_upper_refined_exact(n, table, prod):
    return 14**n * prod < (7 * table.p(n) - n) ** n


def _robin_average(ns, table):
    q, s = _p(table, ns // 2), table.prefix_sum[ns]
    n, q, s = _ints(ns, q, s, bound=int(ns.max()) * int(q.max()) + int(s.max()))
    return _from_bool(n * q <= s)


def _rooin_omega_upper(ns, table):
    out = np.empty(ns.size, dtype=np.int8)
    for i, n in enumerate(ns.tolist()):
        bound = refined_upper_bounds(n, table).omega
        out[i] = certify_less(table.theta(n), bound)
    return out


def _rooin_closed_upper(ns, table):
    n = _iv(ns)
    p = _iv(_p(table, ns))
    step = (Interval(2.0).log() / n).expm1()
    floor = ((p / (2 * n)).log() + n * step.log()).exp()
    arg = (_iv(7 * _p(table, ns) - ns) / 14) - floor
    if np.any(arg.lo <= 0.0):
        raise DomainError("nonpositive argument in the closed-form bound")
    return certify_less(_theta(table, ns), n * arg.log())


_euclid, _euclid_exact = _power_of_next(1)
_bonse_sq, _bonse_sq_exact = _power_of_next(2)
_bonse_cube, _bonse_cube_exact = _power_of_next(3)


REGISTRY: dict[str, InequalityDef] = {}


def _register(entry: InequalityDef) -> None:
    if entry.id in REGISTRY:
        raise ValueError(f"duplicate id {entry.id}")
    REGISTRY[entry.id] = entry


E, R = Kind.EXACT_INTEGER, Kind.INTERVAL_REAL
for _entry in (
    InequalityDef("mandl", "sum_{i<=n} p_i < (n/2) p_n", 1, 9, E,
                  "Mandl; Rosser-Schoenfeld", _mandl),
    InequalityDef("mandl_refined", "sum_{i<=n} p_i < (n/2) p_n - n^2/14", 1, 10, E,
                  "Mandl, refined", _mandl_refined),
    InequalityDef("integral_gap", "n p_n - sum >= c + (p_n^2 / 2 log p_n)(1 + 3 / 2 log p_n)",
                  1, 109, R, "Dusart pi(x) bounds; Li(x)", _integral_gap),
    InequalityDef("half_gap", "(n/2) p_n - sum >= c + 0.1119 p_n^2 / log^2 p_n", 1, 109, R,
                  "Dusart pi(x) bounds; Li(x)", _half_gap),
    InequalityDef("euclid_lower", "p_1 ... p_n > p_{n+1}", 1, 2, R,
                  "Euclid", _euclid, _euclid_exact, 1),
    InequalityDef("bonse_sq", "p_1 ... p_n > p_{n+1}^2", 1, 4, R,
                  "Bonse", _bonse_sq, _bonse_sq_exact, 1),
    InequalityDef("bonse_cube", "p_1 ... p_n > p_{n+1}^3", 1, 5, R,
                  "Bonse", _bonse_cube, _bonse_cube_exact, 1),
    InequalityDef("sandor", "p_1 ... p_n > p_{n+5}^2 + p_{floor(n/2)}^2", 2, 24, R,
                  "Sandor", _sandor, _sandor_exact, 5),
    InequalityDef("panaitopol", "p_1 ... p_n > p_{n+1}^{n - pi(n)}", 1, 2, R,
                  "Panaitopol", _panaitopol, _panaitopol_exact, 1),
    InequalityDef("panaitopol_refined", "p_1 ... p_n > p_{n+1}^{(1 - 1/log n)(n - pi(n))}", 2, 101, R,
                  "Panaitopol, refined; Rosser-Schoenfeld; Robin", _panaitopol_refined, None, 1),
    InequalityDef("agm_upper", "p_1 ... p_n < (p_n / 2)^n", 1, 5, R,
                  "AM-GM; Mandl", _agm_upper, _agm_upper_exact),
    InequalityDef("agm_upper_refined", "p_1 ... p_n < (p_n/2 - n/14)^n", 1, 5, R,
                  "AM-GM; Mandl, refined", _agm_upper_refined, _agm_upper_refined_exact),
    InequalityDef("robin_average", "n p_{floor(n/2)} <= sum_{i<=n} p_i", 2, 2, E,
                  "Robin", _robin_average),
    InequalityDef("rooin_omega_upper", "p_1 ... p_n < (p_n/2 - n/14 - Omega(n))^n", 10, 10, R,
                  "Rooin AM-GM refinement", _rooin_omega_upper),
    InequalityDef("rooin_closed_upper",
                  "p_1 ... p_n < ((p_n/2)(1 - (2^{1/n} - 1)^n / n) - n/14)^n", 2, 10, R,
                  "Rooin AM-GM refinement", _rooin_closed_upper),
):
    _register(_entry)
del _entry


def get(ineq_id: str) -> InequalityDef:
    try:
        return REGISTRY[ineq_id]
    except KeyError:
        valid = ", ".join(REGISTRY)
        raise UnknownInequality(f"unknown inequality {ineq_id!r}; valid ids: {valid}") from None


def ids() -> list[str]:
    return list(REGISTRY)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def max_index(entry: InequalityDef, table: PrimeTable) -> int:
    """Largest n the table supports for this entry."""
    return table.count - entry.lookahead


def _check_range(entry: InequalityDef, a: int, b: int, table: PrimeTable) -> None:
    if a < entry.domain_min:
        raise DomainError(f"{entry.id} is defined from n = {entry.domain_min}, got {a}")
    if b < a:
        raise DomainError(f"empty range [{a}, {b}]")
    if b > max_index(entry, table):
        raise TableTooSmall(
            f"{entry.id} at n = {b} needs p_{b + entry.lookahead}; table holds {table.count} primes")


def _evaluate_block(entry: InequalityDef, a: int, b: int, table: PrimeTable,
                    product_cap: int) -> np.ndarray:
    ns = np.arange(a, b + 1, dtype=np.int64)
    verdicts = np.asarray(entry.batch(ns, table), dtype=np.int8)
    if entry.exact is None:
        return verdicts
    top = min(b, product_cap)
    if a <= top:
        prod = _product(table.primes, a)
        for n in range(a, top + 1):
            if n > a:
                prod *= table.p(n)
            verdicts[n - a] = Verdict.HOLDS if entry.exact(n, table, prod) else Verdict.FAILS
    for i in np.flatnonzero(verdicts == Verdict.UNDECIDED).tolist():
        n = a + i
        verdicts[i] = Verdict.HOLDS if entry.exact(n, table, _product(table.primes, n)) else Verdict.FAILS
    return verdicts


def evaluate(ineq_id: str, n: int, table: PrimeTable,
             product_cap: int = DEFAULT_PRODUCT_CAP) -> Verdict:
    entry = get(ineq_id)
    _check_range(entry, n, n, table)
    return Verdict(int(_evaluate_block(entry, n, n, table, product_cap)[0]))


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Run:
    start: int
    end: int
    verdict: Verdict


@dataclass(frozen=True)
class VerificationReport:
    id: str
    start: int
    end: int
    runs: tuple
    first_failure: Optional[int]
    undecided: tuple
    wall_time: float = field(default=0.0, compare=False)

    @property
    def holds_all(self) -> bool:
        return all(r.verdict == Verdict.HOLDS for r in self.runs)

    def count(self, verdict: Verdict) -> int:
        return sum(r.end - r.start + 1 for r in self.runs if r.verdict == verdict)

    def rows(self):
        for r in self.runs:
            yield {"id": self.id, "start": r.start, "end": r.end, "verdict": str(r.verdict)}

    def to_csv(self, fh, header: bool = True) -> None:
        writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS, lineterminator="\n")
        if header:
            writer.writeheader()
        writer.writerows(self.rows())

    def to_jsonl(self, fh) -> None:
        for row in self.rows():
            fh.write(json.dumps(row) + "\n")


REPORT_FIELDS = ("id", "start", "end", "verdict")


def _compress(start: int, verdicts: np.ndarray) -> tuple:
    if verdicts.size == 0:
        return ()
    cuts = np.flatnonzero(np.diff(verdicts)) + 1
    bounds = np.concatenate(([0], cuts, [verdicts.size]))
    return tuple(
        Run(start + int(lo), start + int(hi) - 1, Verdict(int(verdicts[lo])))
        for lo, hi in zip(bounds[:-1], bounds[1:])
    )


def report_from_runs(ineq_id: str, runs: Iterable[Run], wall_time: float = 0.0) -> VerificationReport:
    runs = tuple(sorted(runs, key=lambda r: r.start))
    if not runs:
        raise ValueError("a report needs at least one run")
    first_failure = next((r.start for r in runs if r.verdict == Verdict.FAILS), None)
    undecided = tuple(n for r in runs if r.verdict == Verdict.UNDECIDED
                      for n in range(r.start, r.end + 1))
    return VerificationReport(ineq_id, runs[0].start, runs[-1].end, runs, first_failure,
                              undecided, wall_time)


def report_from_rows(rows: Iterable[dict]) -> VerificationReport:
    """Rebuild a report from parsed CSV / JSON-lines rows of a single inequality."""
    rows = list(rows)
    ids_seen = {r["id"] for r in rows}
    if len(ids_seen) != 1:
        raise ValueError(f"rows mix inequalities: {sorted(ids_seen)}")
    runs = [Run(int(r["start"]), int(r["end"]), Verdict.parse(str(r["verdict"]))) for r in rows]
    return report_from_runs(ids_seen.pop(), runs)


def read_csv_reports(text: str) -> list[VerificationReport]:
    rows = list(csv.DictReader(io.StringIO(text)))
    grouped: dict[str, list] = {}
    for row in rows:
        grouped.setdefault(row["id"], []).append(row)
    return [report_from_rows(g) for g in grouped.values()]


def read_jsonl_reports(text: str) -> list[VerificationReport]:
    grouped: dict[str, list] = {}
    for line in text.splitlines():
        if line.strip():
            row = json.loads(line)
            grouped.setdefault(row["id"], []).append(row)
    return [report_from_rows(g) for g in grouped.values()]


# ---------------------------------------------------------------------------
# range verification and crossover search
# ---------------------------------------------------------------------------

DEFAULT_CHUNK = 1 << 15


def sweep(ineq_id: str, a: int, b: int, table: PrimeTable, workers: int = 1,
          product_cap: int = DEFAULT_PRODUCT_CAP, chunk: int = DEFAULT_CHUNK) -> np.ndarray:
    """Verdict codes for every index in ``[a, b]`` (int8 array, position 0 is ``a``)."""
    entry = get(ineq_id)
    _check_range(entry, a, b, table)
    if workers < 1:
        raise DomainError("workers must be >= 1")
    blocks = [(lo, min(lo + chunk - 1, b)) for lo in range(a, b + 1, chunk)]

    def run(block):
        return _evaluate_block(entry, block[0], block[1], table, product_cap)

    if workers == 1 or len(blocks) == 1:
        parts = [run(blk) for blk in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))  # map preserves block order
    return np.concatenate(parts)


def verify_range(ineq_id: str, a: int, b: int, table: PrimeTable, workers: int = 1,
                 product_cap: int = DEFAULT_PRODUCT_CAP,
                 chunk: int = DEFAULT_CHUNK) -> VerificationReport:
    t0 = time.perf_counter()
    verdicts = sweep(ineq_id, a, b, table, workers, product_cap, chunk)
    return report_from_runs(ineq_id, _compress(a, verdicts), time.perf_counter() - t0)


@dataclass(frozen=True)
class Crossover:
    id: str
    domain_min: int
    search_limit: int
    stable_from: int
    last_failure: Optional[int]
    undecided: tuple


def crossover(ineq_id: str, search_limit: int, table: PrimeTable, workers: int = 1,
              product_cap: int = DEFAULT_PRODUCT_CAP) -> Crossover:
    """Smallest index from which the inequality holds through ``search_limit``.

    Undecided indices count as not holding and are listed separately.
    """
    entry = get(ineq_id)
    a = entry.domain_min
    verdicts = sweep(ineq_id, a, search_limit, table, workers, product_cap)
    bad = np.flatnonzero(verdicts != Verdict.HOLDS)
    stable = a + int(bad[-1]) + 1 if bad.size else a
    fails = np.flatnonzero(verdicts == Verdict.FAILS)
    last_failure = a + int(fails[-1]) if fails.size else None
    undecided = tuple((a + np.flatnonzero(verdicts == Verdict.UNDECIDED)).tolist())
    return Crossover(ineq_id, a, search_limit, stable, last_failure, undecided)


def summary_line(report: VerificationReport) -> str:
    holds = report.count(Verdict.HOLDS)
    fails = report.count(Verdict.FAILS)
    und = report.count(Verdict.UNDECIDED)
    status = "holds_all" if report.holds_all else ("fails" if fails else "undecided")
    ff = "-" if report.first_failure is None else str(report.first_failure)
    return (f"{report.id}: [{report.start}, {report.end}] {status} "
            f"holds={holds} fails={fails} undecided={und} first_failure={ff} "
            f"time={report.wall_time:.3f}s")
