"""Prime tables: the first N primes with exact prefix sums and certified theta.

Tables are 1-indexed at the API boundary (``table.p(1) == 2``).  Internally
``primes`` is a 0-based array while ``prefix_sum`` and the theta endpoint
arrays carry a leading zero entry, so ``prefix_sum[n]`` is the sum of the
first ``n`` primes and ``theta_lo[n] <= theta(p_n) <= theta_hi[n]``.
"""

from __future__ import annotations

import hashlib
import math
import os
import struct
from dataclasses import dataclass
from itertools import accumulate

import numpy as np

from .errors import CapExceeded, CorruptCache, DomainError, IndexOutOfRange, ResourceExhausted
from .rigor import TRANSCENDENTAL_ULPS, Interval, _vdown, _vup

DEFAULT_SEGMENT = 1 << 20
DEFAULT_PRODUCT_CAP = 5000
# 32 bytes per prime in the table plus sieve scratch; ~1.6 GB at the ceiling
MAX_TABLE_COUNT = 50_000_000

# per-term bound on |computed log p - log p| after widening, absolute units;
# log p < 32 for any storable prime so 4 ulps each side is below 2**-45
EPS_LOG = 2.0**-44

_SMALL = (2, 3, 5, 7, 11)
_MAGIC = b"PGT1"
_LOG_SCALE = 2**53  # every double >= 0.5 is an integer multiple of 2**-53


# ---------------------------------------------------------------------------
# sieve
# ---------------------------------------------------------------------------

def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def segmented_sieve(limit: int, segment: int = DEFAULT_SEGMENT) -> np.ndarray:
    """All primes ``<= limit`` as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    root = math.isqrt(limit)
    base = _simple_sieve(root)
    chunks = [base]
    low = root + 1
    while low <= limit:
        high = min(low + segment, limit + 1)  # exclusive
        flags = np.ones(high - low, dtype=bool)
        for p in base.tolist():
            if p * p >= high:
                break
            start = max(p * p, -(-low // p) * p)
            flags[start - low :: p] = False
        chunks.append(np.flatnonzero(flags).astype(np.int64) + low)
        low = high
    return np.concatenate(chunks)


def nth_prime_upper(n: int) -> int:
    """Integer ceiling of ``n(log n + log log n)``, a bound on ``p_n`` for n >= 6."""
    if n < 6:
        return _SMALL[n - 1] if n >= 1 else 2
    ln = math.log(n)
    # a few units of slack cover the float evaluation of the bound itself
    return int(n * (ln + math.log(ln))) + 2


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PrimeTable:
    primes: np.ndarray      # int64, primes[i] = p_{i+1}
    prefix_sum: np.ndarray  # int64, prefix_sum[n] = p_1 + ... + p_n, prefix_sum[0] = 0
    theta_lo: np.ndarray    # float64, length count + 1
    theta_hi: np.ndarray

    def __post_init__(self):
        for arr in (self.primes, self.prefix_sum, self.theta_lo, self.theta_hi):
            arr.setflags(write=False)

    @property
    def count(self) -> int:
        return int(self.primes.size)

    @property
    def largest(self) -> int:
        return int(self.primes[-1])

    def _check(self, n: int) -> int:
        n = int(n)
        if not 1 <= n <= self.count:
            raise IndexOutOfRange(f"index {n} outside 1..{self.count}")
        return n

    def p(self, n: int) -> int:
        """The n-th prime."""
        return int(self.primes[self._check(n) - 1])

    def sum_to(self, n: int) -> int:
        """Exact ``p_1 + ... + p_n``."""
        return int(self.prefix_sum[self._check(n)])

    def theta(self, n: int) -> Interval:
        n = self._check(n)
        return Interval(self.theta_lo[n], self.theta_hi[n])

    def __eq__(self, other):
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in (
                (self.primes, other.primes),
                (self.prefix_sum, other.prefix_sum),
                (self.theta_lo.view(np.uint64), other.theta_lo.view(np.uint64)),
                (self.theta_hi.view(np.uint64), other.theta_hi.view(np.uint64)),
            )
        )

    def __repr__(self):
        return f"PrimeTable(count={self.count}, largest={self.largest if self.count else None})"


def _log_terms(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    logs = np.fromiter(map(math.log, primes.tolist()), dtype=np.float64, count=primes.size)
    return _vdown(logs, TRANSCENDENTAL_ULPS), _vup(logs, TRANSCENDENTAL_ULPS)


def _exact_prefix(terms: np.ndarray) -> list[int]:
    # terms >= log 2 > 0.5 are exact multiples of 2**-53; summing the scaled
    # integers makes the running sum exact and leaves a single final rounding
    scaled = (terms * _LOG_SCALE).astype(np.int64).tolist()
    return list(accumulate(scaled))


def _theta_prefix(primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo_terms, hi_terms = _log_terms(primes)
    n = primes.size
    lo = np.empty(n + 1)
    hi = np.empty(n + 1)
    lo[0] = hi[0] = 0.0
    if n:
        lo[1:] = np.array([float(s) for s in _exact_prefix(lo_terms)]) / _LOG_SCALE
        hi[1:] = np.array([float(s) for s in _exact_prefix(hi_terms)]) / _LOG_SCALE
        lo[1:] = _vdown(lo[1:])
        hi[1:] = _vup(hi[1:])
    return lo, hi


def _from_primes(primes: np.ndarray) -> PrimeTable:
    prefix = np.zeros(primes.size + 1, dtype=np.int64)
    np.cumsum(primes, out=prefix[1:])
    lo, hi = _theta_prefix(primes)
    return PrimeTable(primes, prefix, lo, hi)


def build_table(n_target: int, *, segment: int = DEFAULT_SEGMENT,
                max_count: int = MAX_TABLE_COUNT) -> PrimeTable:
    """Table of the first ``n_target`` primes.

    The sieve limit is the Rosser-type bound ``n(log n + log log n)``; if it
    ever comes up short the limit is doubled and the sieve rerun.
    """
    n_target = int(n_target)
    if n_target < 1:
        raise DomainError("n_target must be >= 1")
    if n_target > max_count:
        raise ResourceExhausted(f"{n_target} primes exceeds the ceiling of {max_count}")
    if n_target < 6:
        return _from_primes(np.array(_SMALL[:n_target], dtype=np.int64))
    limit = nth_prime_upper(n_target)
    while True:
        primes = segmented_sieve(limit, segment)
        if primes.size >= n_target:
            break
        limit *= 2
    return _from_primes(primes[:n_target].copy())


def pi_of(table: PrimeTable, x: int) -> int:
    """Number of primes ``<= x``; needs ``x <= `` the largest stored prime."""
    if x < 0:
        raise DomainError("pi_of needs x >= 0")
    if table.count == 0 or x > table.largest:
        raise IndexOutOfRange(f"x = {x} exceeds the largest stored prime")
    return int(np.searchsorted(table.primes, x, side="right"))


def pi_many(table: PrimeTable, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs)
    if xs.size and int(xs.max()) > table.largest:
        raise IndexOutOfRange("argument exceeds the largest stored prime")
    return np.searchsorted(table.primes, xs, side="right").astype(np.int64)


def theta_of(table: PrimeTable, n: int) -> Interval:
    """Certified enclosure of ``theta(p_n) = log(p_1 ... p_n)``."""
    return table.theta(n)


def _product(primes: np.ndarray, n: int) -> int:
    return math.prod(primes[:n].tolist())


def primorial_exact(table: PrimeTable, n: int, cap: int = DEFAULT_PRODUCT_CAP) -> int:
    """Exact ``p_1 p_2 ... p_n`` for ``n <= cap``."""
    n = table._check(n)
    if n > cap:
        raise CapExceeded(f"n = {n} above exact product cap {cap}; compare via theta instead")
    return _product(table.primes, n)


@dataclass(frozen=True)
class EuclidNumber:
    n: int
    value: int  # p_1 ... p_n - 1


def euclid_number(table: PrimeTable, n: int, cap: int = DEFAULT_PRODUCT_CAP) -> EuclidNumber:
    return EuclidNumber(n, primorial_exact(table, n, cap) - 1)


# ---------------------------------------------------------------------------
# cache file
# ---------------------------------------------------------------------------
#   magic "PGT1" | u64 count | u64 primes[count] | (u64 lo, u64 hi) prefix[count]
#   | (f64 lo, f64 hi) theta[count] | u64 checksum
# all little-endian; checksum is the first 8 bytes of blake2b over everything before it

def _payload(table: PrimeTable) -> bytes:
    n = table.count
    sums = table.prefix_sum[1:].astype("<i8")
    limbs = np.empty((n, 2), dtype="<u8")
    limbs[:, 0] = sums.view("<u8")
    limbs[:, 1] = np.where(sums < 0, np.uint64(2**64 - 1), np.uint64(0))
    theta = np.empty((n, 2), dtype="<f8")
    theta[:, 0] = table.theta_lo[1:]
    theta[:, 1] = table.theta_hi[1:]
    return b"".join((
        _MAGIC,
        struct.pack("<Q", n),
        table.primes.astype("<u8").tobytes(),
        limbs.tobytes(),
        theta.tobytes(),
    ))


def _checksum(data: bytes) -> bytes:
    return hashlib.blake2b(data, digest_size=8).digest()


def save_cache(table: PrimeTable, path) -> None:
    data = _payload(table)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.write(_checksum(data))
    os.replace(tmp, path)


def load_cache(path) -> PrimeTable:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 20 or blob[:4] != _MAGIC:
        raise CorruptCache(f"{path}: bad magic or header")
    (n,) = struct.unpack_from("<Q", blob, 4)
    expected = 12 + n * (8 + 16 + 16) + 8
    if len(blob) != expected:
        raise CorruptCache(f"{path}: expected {expected} bytes, found {len(blob)}")
    body, tail = blob[:-8], blob[-8:]
    if _checksum(body) != tail:
        raise CorruptCache(f"{path}: checksum mismatch")
    off = 12
    primes = np.frombuffer(body, dtype="<u8", count=n, offset=off).astype(np.int64)
    off += 8 * n
    limbs = np.frombuffer(body, dtype="<u8", count=2 * n, offset=off).reshape(n, 2)
    off += 16 * n
    theta = np.frombuffer(body, dtype="<f8", count=2 * n, offset=off).reshape(n, 2)
    if np.any(limbs[:, 1] != np.where(limbs[:, 0] >> np.uint64(63), np.uint64(2**64 - 1), np.uint64(0))):
        raise CorruptCache(f"{path}: prefix sum exceeds 64-bit range")
    prefix = np.zeros(n + 1, dtype=np.int64)
    prefix[1:] = limbs[:, 0].view(np.int64)
    lo = np.zeros(n + 1)
    hi = np.zeros(n + 1)
    lo[1:] = theta[:, 0]
    hi[1:] = theta[:, 1]
    return PrimeTable(primes, prefix, lo, hi)
