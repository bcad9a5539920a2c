"""Monthly-calendar time series: container, alignment, transforms, statistics.

Series are immutable after construction and sit on a strict monthly grid:
observation ``k`` belongs to ``start`` advanced by ``k`` months, with no
gaps or duplicates. Missing months are a hard error everywhere in this
package because the downstream unit-root and cointegration machinery
assumes a regular sampling grid.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, DataError, DegeneracyError, SeriesDomainError

__all__ = [
    "MonthStamp",
    "MonthlySeries",
    "span_length",
    "align",
    "log_series",
    "diff",
    "pearson_correlation",
]

_DATE_RE = re.compile(r"^(\d{4})-(\d{2})$")


@dataclass(frozen=True, order=True)
class MonthStamp:
    """A calendar month, totally ordered by (year, month)."""

    year: int
    month: int

    def __post_init__(self) -> None:
        if not (isinstance(self.year, int) and isinstance(self.month, int)):
            raise DataError(f"MonthStamp fields must be integers, got {self!r}")
        if not 1 <= self.month <= 12:
            raise DataError(f"month must be in 1..12, got {self.month}")

    @property
    def index(self) -> int:
        """Months elapsed since 0000-01; the total order in integer form."""
        return self.year * 12 + (self.month - 1)

    def shift(self, months: int) -> "MonthStamp":
        """The stamp ``months`` later (earlier if negative)."""
        i = self.index + months
        return MonthStamp(i // 12, i % 12 + 1)

    @classmethod
    def parse(cls, text: str) -> "MonthStamp":
        """Parse ``YYYY-MM``."""
        m = _DATE_RE.match(text.strip())
        if m is None:
            raise DataError(f"dates must be formatted YYYY-MM, got {text!r}")
        return cls(int(m.group(1)), int(m.group(2)))

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}"


def span_length(a: MonthStamp, b: MonthStamp) -> int:
    """Number of months from ``a`` to ``b``, inclusive of both endpoints."""
    if a > b:
        raise DataError(f"start {a} is after end {b}")
    return b.index - a.index + 1


@dataclass(frozen=True)
class MonthlySeries:
    """A contiguous monthly series of finite float values.

    The value buffer is copied on construction and frozen; instances are
    safe to share across threads.
    """

    start: MonthStamp
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if arr.size < 1:
            raise DataError("a series needs at least one observation")
        if not np.all(np.isfinite(arr)):
            k = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DataError(
                f"non-finite value at {self.start.shift(k)} (position {k})"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def end(self) -> MonthStamp:
        return self.start.shift(len(self) - 1)

    def dates(self) -> list[MonthStamp]:
        return [self.start.shift(k) for k in range(len(self))]

    def slice(self, begin: MonthStamp, end: MonthStamp) -> "MonthlySeries":
        """Restrict to the inclusive range [begin, end]."""
        if begin > end:
            raise DataError(f"empty slice: {begin} after {end}")
        if begin < self.start or end > self.end:
            raise DataError(
                f"slice [{begin}, {end}] outside series range "
                f"[{self.start}, {self.end}]"
            )
        i = begin.index - self.start.index
        j = end.index - self.start.index + 1
        return MonthlySeries(begin, self.values[i:j])

    def with_values(self, values: np.ndarray) -> "MonthlySeries":
        """Same start date, new values of the same length."""
        arr = np.asarray(values, dtype=float)
        if arr.size != len(self):
            raise DataError("replacement values must preserve length")
        return MonthlySeries(self.start, arr)


def align(a: MonthlySeries, b: MonthlySeries) -> tuple[MonthlySeries, MonthlySeries]:
    """Restrict both series to their common date range.

    Raises AlignmentError when the ranges are disjoint.
    """
    begin = max(a.start, b.start)
    end = min(a.end, b.end)
    if begin > end:
        raise AlignmentError(
            f"no overlap between [{a.start}, {a.end}] and [{b.start}, {b.end}]"
        )
    return a.slice(begin, end), b.slice(begin, end)


def log_series(s: MonthlySeries) -> MonthlySeries:
    """Elementwise natural log; every value must be strictly positive."""
    bad = np.flatnonzero(s.values <= 0.0)
    if bad.size:
        k = int(bad[0])
        raise SeriesDomainError(
            f"log undefined: value {s.values[k]!r} at {s.start.shift(k)}"
        )
    return MonthlySeries(s.start, np.log(s.values))


def diff(s: MonthlySeries, order: int = 1) -> MonthlySeries:
    """First differences applied ``order`` times.

    The start advances by ``order`` months and the length shrinks by
    ``order``.
    """
    if order < 1:
        raise DataError(f"difference order must be >= 1, got {order}")
    if len(s) <= order:
        raise DataError(
            f"need more than {order} observations to difference, have {len(s)}"
        )
    return MonthlySeries(s.start.shift(order), np.diff(s.values, n=order))


def pearson_correlation(a: MonthlySeries, b: MonthlySeries) -> float:
    """Sample Pearson correlation of two aligned series.

    Requires identical date ranges, length >= 3, and nonzero sample
    variance on both sides.
    """
    if a.start != b.start or len(a) != len(b):
        raise DataError(
            "series must be aligned (same start and length); use align() first"
        )
    if len(a) < 3:
        raise DataError(f"need at least 3 observations, have {len(a)}")
    x = a.values - a.values.mean()
    y = b.values - b.values.mean()
    sx = math.sqrt(float(x @ x))
    sy = math.sqrt(float(y @ y))
    if sx == 0.0 or sy == 0.0:
        raise DegeneracyError("correlation undefined for a constant series")
    return float(x @ y) / (sx * sy)
