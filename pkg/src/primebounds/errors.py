"""Exception hierarchy shared by every primebounds module."""


class PrimeBoundsError(Exception):
    """Base class for all library errors."""


class DomainError(PrimeBoundsError, ValueError):
    """Argument outside the domain where a function is defined."""


class IntervalDivisionError(PrimeBoundsError, ZeroDivisionError):
    """Division by an interval that contains zero."""


class IndexOutOfRange(PrimeBoundsError, IndexError):
    """Index or argument beyond what a prime table stores."""


class TableTooSmall(IndexOutOfRange):
    """A predicate needs primes beyond the end of the table."""


class CapExceeded(PrimeBoundsError):
    """Exact primorial requested above the configured cap."""


class CorruptCache(PrimeBoundsError):
    """Cache file failed the magic, length or checksum check."""


class ResourceExhausted(PrimeBoundsError, MemoryError):
    """Requested table would exceed the configured memory ceiling."""


class UnknownInequality(PrimeBoundsError, KeyError):
    """No catalog entry with the requested id."""

    def __str__(self):
        return str(self.args[0]) if self.args else "unknown inequality"


class IntervalOverflow(PrimeBoundsError, OverflowError):
    """An interval endpoint overflowed the double range."""
