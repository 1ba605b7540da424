"""Outward-rounded interval arithmetic on double endpoints.

Every real quantity the toolkit compares is carried as an :class:`Interval`
(scalar) or an :class:`IntervalArray` (numpy-vectorised, used by the sweeps).
Rounding is handled by nudging endpoints with ``nextafter`` after each
round-to-nearest operation, so nothing depends on the FPU rounding mode.

Basic arithmetic (+, -, *, /) is IEEE correctly rounded, so one ulp of
outward nudging is enough.  Transcendentals come from the platform libm
(via :mod:`math`) and are widened by ``TRANSCENDENTAL_ULPS`` on each side.
"""

from __future__ import annotations

import math
from enum import IntEnum
from fractions import Fraction
from numbers import Integral

import numpy as np

from .errors import DomainError, IntervalDivisionError, IntervalOverflow

TRANSCENDENTAL_ULPS = 4

_INF = math.inf
_EXACT_INT_LIMIT = 2**53


class Verdict(IntEnum):
    FAILS = 0
    HOLDS = 1
    UNDECIDED = 2

    def __str__(self):
        return self.name.lower()

    @classmethod
    def parse(cls, text: str) -> "Verdict":
        return cls[text.strip().upper()]


# ---------------------------------------------------------------------------
# endpoint nudging
# ---------------------------------------------------------------------------

def _down(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -_INF)
    return x


def _up(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, _INF)
    return x


def _vdown(x: np.ndarray, ulps: int = 1) -> np.ndarray:
    for _ in range(ulps):
        x = np.nextafter(x, -_INF)
    return x


def _vup(x: np.ndarray, ulps: int = 1) -> np.ndarray:
    for _ in range(ulps):
        x = np.nextafter(x, _INF)
    return x


def _mapf(fn, arr: np.ndarray) -> np.ndarray:
    # libm through the math module: numpy's SIMD kernels carry no ulp guarantee
    flat = arr.ravel().tolist()
    out = np.fromiter(map(fn, flat), dtype=np.float64, count=len(flat))
    return out.reshape(arr.shape)


def _libm(fn, x):
    try:
        return fn(x)
    except (OverflowError, ValueError) as exc:
        raise DomainError(f"{fn.__name__}({x!r}): {exc}") from None


# ---------------------------------------------------------------------------
# scalar intervals
# ---------------------------------------------------------------------------

class Interval:
    """Closed interval ``[lo, hi]`` with finite double endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if math.isinf(lo) or math.isinf(hi):
            raise IntervalOverflow(f"interval endpoint overflows: [{lo!r}, {hi!r}]")
        if not (lo <= hi):
            raise DomainError(f"invalid interval [{lo!r}, {hi!r}]")
        self.lo = lo
        self.hi = hi

    # -- construction -----------------------------------------------------

    @classmethod
    def from_int(cls, k: int) -> "Interval":
        k = int(k)
        try:
            f = float(k)
        except OverflowError:
            raise DomainError(f"integer {k} exceeds double range") from None
        if f == k:
            return cls(f, f)
        return cls(_down(f), f) if f > k else cls(f, _up(f))

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Interval":
        f = float(q)
        if f == q:
            return cls(f, f)
        return cls(_down(f), f) if f > q else cls(f, _up(f))

    @classmethod
    def from_decimal(cls, text: str) -> "Interval":
        """Tightest interval around a decimal literal such as ``"1.2762"``."""
        return cls.from_fraction(Fraction(text))

    @classmethod
    def coerce(cls, x) -> "Interval":
        if isinstance(x, Interval):
            return x
        if isinstance(x, (bool, np.bool_)):
            raise TypeError("booleans are not intervals")
        if isinstance(x, Integral):
            return cls.from_int(int(x))
        if isinstance(x, (float, np.floating)):
            return cls(float(x))
        if isinstance(x, Fraction):
            return cls.from_fraction(x)
        if isinstance(x, str):
            return cls.from_decimal(x)
        raise TypeError(f"cannot make an interval from {type(x).__name__}")

    # -- inspection -------------------------------------------------------

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x) -> bool:
        # int/float/Fraction comparisons against floats are exact in Python
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= x <= self.hi

    __contains__ = contains

    def overlaps(self, other) -> bool:
        other = Interval.coerce(other)
        return self.lo <= other.hi and other.lo <= self.hi

    def hull(self, other) -> "Interval":
        other = Interval.coerce(other)
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def nonneg(self) -> "Interval":
        """Clip to ``[0, inf)``; only valid when the exact value is known >= 0."""
        if self.hi < 0:
            raise DomainError(f"{self!r} lies entirely below zero")
        return Interval(max(self.lo, 0.0), self.hi)

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __iter__(self):
        yield self.lo
        yield self.hi

    # -- arithmetic -------------------------------------------------------

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        try:
            other = Interval.coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(_down(self.lo + other.lo), _up(self.hi + other.hi))

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Interval.coerce(other)
        except TypeError:
            return NotImplemented
        return Interval(_down(self.lo - other.hi), _up(self.hi - other.lo))

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        try:
            other = Interval.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        prods = (a * c, a * d, b * c, b * d)
        return Interval(_down(min(prods)), _up(max(prods)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            other = Interval.coerce(other)
        except TypeError:
            return NotImplemented
        if other.lo <= 0.0 <= other.hi:
            raise IntervalDivisionError(f"division by {other!r}")
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        quots = (a / c, a / d, b / c, b / d)
        return Interval(_down(min(quots)), _up(max(quots)))

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, Integral) and not isinstance(exponent, bool):
            return self.powi(int(exponent))
        return self.pow(exponent)

    # -- elementary functions ---------------------------------------------

    def log(self) -> "Interval":
        if self.lo <= 0.0:
            raise DomainError(f"log of {self!r}")
        u = TRANSCENDENTAL_ULPS
        return Interval(_down(math.log(self.lo), u), _up(math.log(self.hi), u))

    def exp(self) -> "Interval":
        u = TRANSCENDENTAL_ULPS
        lo = max(_down(_libm(math.exp, self.lo), u), 0.0)
        hi = _up(_libm(math.exp, self.hi), u)
        return Interval(lo, hi)

    def expm1(self) -> "Interval":
        u = TRANSCENDENTAL_ULPS
        lo = max(_down(_libm(math.expm1, self.lo), u), -1.0)
        return Interval(lo, _up(_libm(math.expm1, self.hi), u))

    def pow(self, exponent) -> "Interval":
        """``self ** exponent`` for a positive base (or zero base, exponent >= 0)."""
        e = Interval.coerce(exponent)
        if self.lo < 0.0 or (self.lo == 0.0 and e.lo < 0.0):
            raise DomainError(f"pow of {self!r} to {e!r}")
        # x**y is monotone in each argument on this domain: extremes sit at corners
        try:
            corners = [math.pow(x, y) for x in (self.lo, self.hi) for y in (e.lo, e.hi)]
        except (OverflowError, ValueError) as exc:
            raise DomainError(f"pow of {self!r} to {e!r}: {exc}") from None
        u = TRANSCENDENTAL_ULPS
        return Interval(max(_down(min(corners), u), 0.0), _up(max(corners), u))

    def powi(self, k: int) -> "Interval":
        """Integer power ``k >= 0``; handles bases of either sign."""
        if k < 0:
            raise DomainError("negative integer exponent")
        if k == 0:
            return Interval(1.0)
        if k == 1:
            return self
        u = TRANSCENDENTAL_ULPS
        try:
            plo = math.pow(self.lo, k)
            phi = math.pow(self.hi, k)
        except OverflowError:
            raise DomainError(f"{self!r} ** {k} overflows") from None
        if self.lo >= 0.0:
            lo, hi = plo, phi
        elif self.hi <= 0.0:
            lo, hi = (phi, plo) if k % 2 == 0 else (plo, phi)
        elif k % 2 == 0:
            return Interval(0.0, _up(max(plo, phi), u))
        else:
            lo, hi = plo, phi
        lo = _down(lo, u)
        if self.lo >= 0.0 or k % 2 == 0:
            lo = max(lo, 0.0)
        return Interval(lo, _up(hi, u))

    def root(self, n: int) -> "Interval":
        """Real ``n``-th root of a nonnegative interval."""
        return self.pow(Interval.from_fraction(Fraction(1, n)))


# ---------------------------------------------------------------------------
# vectorised intervals
# ---------------------------------------------------------------------------

class IntervalArray:
    """Elementwise intervals backed by two float64 arrays."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None, *, check: bool = True):
        lo = np.asarray(lo, dtype=np.float64)
        hi = lo if hi is None else np.asarray(hi, dtype=np.float64)
        if check:
            if lo.shape != hi.shape:
                raise DomainError("endpoint arrays differ in shape")
            if not (np.all(lo <= hi) and np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
                raise DomainError("invalid interval array")
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_values(cls, values) -> "IntervalArray":
        arr = np.asarray(values)
        if arr.dtype == object:
            ivs = [Interval.coerce(v) for v in arr.ravel()]
            lo = np.array([iv.lo for iv in ivs], dtype=np.float64).reshape(arr.shape)
            hi = np.array([iv.hi for iv in ivs], dtype=np.float64).reshape(arr.shape)
            return cls(lo, hi)
        if np.issubdtype(arr.dtype, np.integer):
            if arr.size and int(np.max(np.abs(arr))) > _EXACT_INT_LIMIT:
                raise DomainError("integers beyond 2**53 need object dtype")
            f = arr.astype(np.float64)
            return cls(f, f)
        f = arr.astype(np.float64)
        return cls(f, f)

    @classmethod
    def coerce(cls, x, shape=None):
        if isinstance(x, IntervalArray):
            return x
        if isinstance(x, Interval):
            return x
        if isinstance(x, np.ndarray):
            return cls.from_values(x)
        return Interval.coerce(x)

    def __len__(self):
        return len(self.lo)

    @property
    def shape(self):
        return self.lo.shape

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def mid(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def __getitem__(self, idx):
        lo, hi = self.lo[idx], self.hi[idx]
        if np.ndim(lo) == 0:
            return Interval(float(lo), float(hi))
        return IntervalArray(lo, hi, check=False)

    def __iter__(self):
        for lo, hi in zip(self.lo.tolist(), self.hi.tolist()):
            yield Interval(lo, hi)

    def contains(self, values) -> np.ndarray:
        values = np.asarray(values)
        return (self.lo <= values) & (values <= self.hi)

    def __repr__(self):
        return f"IntervalArray(n={self.lo.size})"

    @staticmethod
    def _ends(x):
        if isinstance(x, (IntervalArray, Interval)):
            return x.lo, x.hi
        x = IntervalArray.coerce(x)
        return x.lo, x.hi

    def __neg__(self):
        return IntervalArray(-self.hi, -self.lo, check=False)

    def __add__(self, other):
        c, d = self._ends(other)
        return IntervalArray(_vdown(self.lo + c), _vup(self.hi + d), check=False)

    __radd__ = __add__

    def __sub__(self, other):
        c, d = self._ends(other)
        return IntervalArray(_vdown(self.lo - d), _vup(self.hi - c), check=False)

    def __rsub__(self, other):
        c, d = self._ends(other)
        return IntervalArray(_vdown(c - self.hi), _vup(d - self.lo), check=False)

    def __mul__(self, other):
        c, d = self._ends(other)
        a, b = self.lo, self.hi
        ps = (a * c, a * d, b * c, b * d)
        lo = np.minimum(np.minimum(ps[0], ps[1]), np.minimum(ps[2], ps[3]))
        hi = np.maximum(np.maximum(ps[0], ps[1]), np.maximum(ps[2], ps[3]))
        return IntervalArray(_vdown(lo), _vup(hi), check=False)

    __rmul__ = __mul__

    @staticmethod
    def _div(a, b, c, d):
        if np.any((c <= 0.0) & (d >= 0.0)):
            raise IntervalDivisionError("division by an interval containing zero")
        qs = (a / c, a / d, b / c, b / d)
        lo = np.minimum(np.minimum(qs[0], qs[1]), np.minimum(qs[2], qs[3]))
        hi = np.maximum(np.maximum(qs[0], qs[1]), np.maximum(qs[2], qs[3]))
        return IntervalArray(_vdown(lo), _vup(hi), check=False)

    def __truediv__(self, other):
        c, d = self._ends(other)
        return self._div(self.lo, self.hi, c, d)

    def __rtruediv__(self, other):
        a, b = self._ends(other)
        return self._div(a, b, self.lo, self.hi)

    def __pow__(self, exponent):
        if isinstance(exponent, Integral) and not isinstance(exponent, bool):
            return self.powi(int(exponent))
        return self.pow(exponent)

    def log(self) -> "IntervalArray":
        if np.any(self.lo <= 0.0):
            raise DomainError("log of a nonpositive interval")
        u = TRANSCENDENTAL_ULPS
        return IntervalArray(_vdown(_mapf(math.log, self.lo), u),
                             _vup(_mapf(math.log, self.hi), u), check=False)

    def exp(self) -> "IntervalArray":
        u = TRANSCENDENTAL_ULPS
        try:
            lo = _mapf(math.exp, self.lo)
            hi = _mapf(math.exp, self.hi)
        except OverflowError:
            raise DomainError("exp overflow") from None
        return IntervalArray(np.maximum(_vdown(lo, u), 0.0), _vup(hi, u), check=False)

    def expm1(self) -> "IntervalArray":
        u = TRANSCENDENTAL_ULPS
        try:
            lo = _mapf(math.expm1, self.lo)
            hi = _mapf(math.expm1, self.hi)
        except OverflowError:
            raise DomainError("expm1 overflow") from None
        return IntervalArray(np.maximum(_vdown(lo, u), -1.0), _vup(hi, u), check=False)

    def nonneg(self) -> "IntervalArray":
        """Clip to ``[0, inf)``; only valid when the exact values are known >= 0."""
        if np.any(self.hi < 0):
            raise DomainError("interval lies entirely below zero")
        return IntervalArray(np.maximum(self.lo, 0.0), self.hi, check=False)

    def pow(self, exponent) -> "IntervalArray":
        c, d = self._ends(exponent)
        c = np.broadcast_to(c, self.lo.shape)
        d = np.broadcast_to(d, self.lo.shape)
        if np.any(self.lo < 0.0) or np.any((self.lo == 0.0) & (c < 0.0)):
            raise DomainError("pow outside its domain")
        try:
            corners = [
                np.fromiter(map(math.pow, x.tolist(), y.tolist()), np.float64, count=x.size)
                for x in (self.lo.ravel(), self.hi.ravel())
                for y in (c.ravel(), d.ravel())
            ]
        except OverflowError:
            raise DomainError("pow overflow") from None
        lo = np.minimum(np.minimum(corners[0], corners[1]), np.minimum(corners[2], corners[3]))
        hi = np.maximum(np.maximum(corners[0], corners[1]), np.maximum(corners[2], corners[3]))
        u = TRANSCENDENTAL_ULPS
        return IntervalArray(np.maximum(_vdown(lo, u), 0.0).reshape(self.lo.shape),
                             _vup(hi, u).reshape(self.lo.shape), check=False)

    def powi(self, k: int) -> "IntervalArray":
        if k < 0:
            raise DomainError("negative integer exponent")
        if k == 0:
            return IntervalArray(np.ones_like(self.lo), check=False)
        if k == 1:
            return self
        if np.any(self.lo < 0.0):
            ivs = [iv.powi(k) for iv in self]
            return IntervalArray([iv.lo for iv in ivs], [iv.hi for iv in ivs], check=False)
        u = TRANSCENDENTAL_ULPS
        try:
            lo = _mapf(lambda v: math.pow(v, k), self.lo)
            hi = _mapf(lambda v: math.pow(v, k), self.hi)
        except OverflowError:
            raise DomainError("powi overflow") from None
        return IntervalArray(np.maximum(_vdown(lo, u), 0.0), _vup(hi, u), check=False)


# ---------------------------------------------------------------------------
# functional interface and certified comparison
# ---------------------------------------------------------------------------

def _lift(a):
    return IntervalArray.coerce(a)


def iv_add(a, b):
    return _lift(a) + b


def iv_sub(a, b):
    return _lift(a) - b


def iv_mul(a, b):
    return _lift(a) * b


def iv_div(a, b):
    a = _lift(a)
    b = _lift(b)
    if isinstance(a, Interval) and isinstance(b, IntervalArray):
        return b.__rtruediv__(a)
    return a / b


def iv_log(a):
    return _lift(a).log()


def iv_exp(a):
    return _lift(a).exp()


def iv_pow(a, b):
    a = _lift(a)
    if isinstance(a, Interval) and isinstance(b, IntervalArray):
        a = IntervalArray(np.full(b.shape, a.lo), np.full(b.shape, a.hi), check=False)
    return a.pow(b)


def certify_less(a, b):
    """Certified ``a < b``.

    Holds iff ``a.hi < b.lo``; Fails iff ``a.lo >= b.hi``; Undecided otherwise.
    Returns a :class:`Verdict` for scalars and an int8 verdict array when
    either side is an :class:`IntervalArray`.
    """
    a = _lift(a)
    b = _lift(b)
    if isinstance(a, Interval) and isinstance(b, Interval):
        if a.hi < b.lo:
            return Verdict.HOLDS
        if a.lo >= b.hi:
            return Verdict.FAILS
        return Verdict.UNDECIDED
    holds = a.hi < b.lo
    fails = a.lo >= b.hi
    out = np.full(np.broadcast(holds, fails).shape, Verdict.UNDECIDED, dtype=np.int8)
    out[np.broadcast_to(holds, out.shape)] = Verdict.HOLDS
    out[np.broadcast_to(fails, out.shape)] = Verdict.FAILS
    return out


def certify_le(a, b):
    """Certified ``a <= b``: Holds iff ``a.hi <= b.lo``; Fails iff ``a.lo > b.hi``."""
    a = _lift(a)
    b = _lift(b)
    if isinstance(a, Interval) and isinstance(b, Interval):
        if a.hi <= b.lo:
            return Verdict.HOLDS
        if a.lo > b.hi:
            return Verdict.FAILS
        return Verdict.UNDECIDED
    holds = a.hi <= b.lo
    fails = a.lo > b.hi
    out = np.full(np.broadcast(holds, fails).shape, Verdict.UNDECIDED, dtype=np.int8)
    out[np.broadcast_to(holds, out.shape)] = Verdict.HOLDS
    out[np.broadcast_to(fails, out.shape)] = Verdict.FAILS
    return out


def verdict_from_bool(value: bool) -> Verdict:
    return Verdict.HOLDS if value else Verdict.FAILS
