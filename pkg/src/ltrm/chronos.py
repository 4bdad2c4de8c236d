"""Discrete time: granularities, time points, intervals and clocks.

A time point is an integer granule index counted from the granule that
contains 1970-01-01 00:00:00 (proleptic Gregorian, no time zones).  Day
arithmetic is done with closed-form civil-date formulas so that the module
never depends on :mod:`datetime` range limits.
"""

from __future__ import annotations

import enum
import re
import time
from dataclasses import dataclass
from typing import Union

from .errors import GranularityMismatch, InvalidDate, InvalidInterval

SECONDS_PER_MINUTE = 60
SECONDS_PER_HOUR = 3600
SECONDS_PER_DAY = 86400
MINUTES_PER_DAY = 1440

# 1970-01-01 is a Thursday; ISO weeks start on Monday, three days earlier.
_WEEK_OFFSET_DAYS = 3


class Granularity(enum.IntEnum):
    """Calendar granularities, ordered from finest to coarsest."""

    SECOND = 0
    MINUTE = 1
    HOUR = 2
    DAY = 3
    WEEK = 4
    MONTH = 5
    YEAR = 6

    @classmethod
    def parse(cls, name: str) -> "Granularity":
        try:
            return cls[name.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown granularity {name!r}") from None


# ---------------------------------------------------------------------------
# civil calendar


def is_leap_year(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def days_in_month(year: int, month: int) -> int:
    if month == 2:
        return 29 if is_leap_year(year) else 28
    return 30 if month in (4, 6, 9, 11) else 31


def days_from_civil(year: int, month: int, day: int) -> int:
    """Days since 1970-01-01 for a proleptic Gregorian date."""
    y = year - (month <= 2)
    era = y // 400
    yoe = y - era * 400
    doy = (153 * (month + (-3 if month > 2 else 9)) + 2) // 5 + day - 1
    doe = yoe * 365 + yoe // 4 - yoe // 100 + doy
    return era * 146097 + doe - 719468


def civil_from_days(days: int) -> tuple[int, int, int]:
    """Inverse of :func:`days_from_civil`; returns ``(year, month, day)``."""
    z = days + 719468
    era = z // 146097
    doe = z - era * 146097
    yoe = (doe - doe // 1460 + doe // 36524 - doe // 146096) // 365
    doy = doe - (365 * yoe + yoe // 4 - yoe // 100)
    mp = (5 * doy + 2) // 153
    day = doy - (153 * mp + 2) // 5 + 1
    month = mp + 3 if mp < 10 else mp - 9
    return yoe + era * 400 + (month <= 2), month, day


def _start_second(g: Granularity, index: int) -> int:
    if g is Granularity.SECOND:
        return index
    if g is Granularity.MINUTE:
        return index * SECONDS_PER_MINUTE
    if g is Granularity.HOUR:
        return index * SECONDS_PER_HOUR
    if g is Granularity.DAY:
        return index * SECONDS_PER_DAY
    if g is Granularity.WEEK:
        return (7 * index - _WEEK_OFFSET_DAYS) * SECONDS_PER_DAY
    if g is Granularity.MONTH:
        year, month0 = divmod(index, 12)
        return days_from_civil(1970 + year, month0 + 1, 1) * SECONDS_PER_DAY
    return days_from_civil(1970 + index, 1, 1) * SECONDS_PER_DAY


def _floor_index(g: Granularity, second: int) -> int:
    """Index of the granule at ``g`` containing ``second``."""
    if g is Granularity.SECOND:
        return second
    if g is Granularity.MINUTE:
        return second // SECONDS_PER_MINUTE
    if g is Granularity.HOUR:
        return second // SECONDS_PER_HOUR
    days = second // SECONDS_PER_DAY
    if g is Granularity.DAY:
        return days
    if g is Granularity.WEEK:
        return (days + _WEEK_OFFSET_DAYS) // 7
    year, month, _ = civil_from_days(days)
    if g is Granularity.MONTH:
        return (year - 1970) * 12 + month - 1
    return year - 1970


def _ceil_index(g: Granularity, second: int) -> int:
    """Index of the first granule at ``g`` starting at or after ``second``."""
    index = _floor_index(g, second)
    if _start_second(g, index) < second:
        index += 1
    return index


# ---------------------------------------------------------------------------
# time points


@dataclass(frozen=True, slots=True)
class TimePoint:
    """A granule of discrete time.  Only points of one granularity compare."""

    granularity: Granularity
    index: int

    def _check(self, other: "TimePoint") -> None:
        if not isinstance(other, TimePoint):
            raise TypeError(f"cannot compare TimePoint with {type(other).__name__}")
        if other.granularity is not self.granularity:
            raise GranularityMismatch(
                f"{self.granularity.name} and {other.granularity.name} points are not comparable"
            )

    def __lt__(self, other: "TimePoint") -> bool:
        self._check(other)
        return self.index < other.index

    def __le__(self, other: "TimePoint") -> bool:
        self._check(other)
        return self.index <= other.index

    def __gt__(self, other: "TimePoint") -> bool:
        self._check(other)
        return self.index > other.index

    def __ge__(self, other: "TimePoint") -> bool:
        self._check(other)
        return self.index >= other.index

    def successor(self) -> "TimePoint":
        return TimePoint(self.granularity, self.index + 1)

    def predecessor(self) -> "TimePoint":
        return TimePoint(self.granularity, self.index - 1)

    def start_second(self) -> int:
        return _start_second(self.granularity, self.index)

    def fields(self) -> tuple[int, int, int, int, int, int]:
        """Calendar fields ``(year, month, day, hour, minute, second)`` of the granule start."""
        days, rem = divmod(self.start_second(), SECONDS_PER_DAY)
        year, month, day = civil_from_days(days)
        hour, rem = divmod(rem, SECONDS_PER_HOUR)
        minute, second = divmod(rem, SECONDS_PER_MINUTE)
        return year, month, day, hour, minute, second

    def __str__(self) -> str:
        return format_timepoint(self)


class _Now:
    """The symbolic open end of an activation interval."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOW"

    def __reduce__(self):
        return (_Now, ())


NOW = _Now()

EndPoint = Union[TimePoint, _Now]


def is_now(end) -> bool:
    return end is NOW


_FIELD_ORDER = ("month", "day", "hour", "minute", "second")
# The coarsest granularity at which each field still carries information.
_FIELD_GRANULARITY = {
    "month": Granularity.MONTH,
    "day": Granularity.DAY,
    "hour": Granularity.HOUR,
    "minute": Granularity.MINUTE,
    "second": Granularity.SECOND,
}
_FIELD_MINIMUM = {"month": 1, "day": 1, "hour": 0, "minute": 0, "second": 0}


def make_timepoint(
    year: int,
    month: int | None = None,
    day: int | None = None,
    hour: int | None = None,
    minute: int | None = None,
    second: int | None = None,
    granularity: Granularity = Granularity.DAY,
) -> TimePoint:
    """Build the time point whose granule at ``granularity`` contains the instant.

    Fields finer than the granularity must be omitted or left at their
    minimum (day 1, hour 0, ...).  WEEK is the exception for the date part:
    any date selects the ISO week containing it.
    """
    values = {"month": month, "day": day, "hour": hour, "minute": minute, "second": second}
    for name in _FIELD_ORDER:
        value = values[name]
        if value is None:
            continue
        finer = _FIELD_GRANULARITY[name] < granularity
        if granularity is Granularity.WEEK and name in ("month", "day"):
            finer = False
        if finer and value != _FIELD_MINIMUM[name]:
            raise GranularityMismatch(f"{name}={value} given for {granularity.name} granularity")

    y = year
    mo = 1 if month is None else month
    d = 1 if day is None else day
    h = 0 if hour is None else hour
    mi = 0 if minute is None else minute
    s = 0 if second is None else second
    if not 1 <= mo <= 12 or not 1 <= d <= days_in_month(y, mo):
        raise InvalidDate(f"{d:02d}-{mo:02d}-{y:04d} is not a calendar date")
    if not (0 <= h < 24 and 0 <= mi < 60 and 0 <= s < 60):
        raise InvalidDate(f"{h:02d}:{mi:02d}:{s:02d} is not a time of day")
    instant = days_from_civil(y, mo, d) * SECONDS_PER_DAY + h * SECONDS_PER_HOUR + mi * SECONDS_PER_MINUTE + s
    return TimePoint(granularity, _floor_index(granularity, instant))


def convert(tp: TimePoint, target: Granularity) -> TimePoint:
    """Move a point to another granularity.

    Coarsening truncates to the containing granule.  Refining picks the first
    target granule that starts inside ``tp``, which makes coarsen(refine(tp))
    the identity even for week/month boundaries that do not align.
    """
    if target is tp.granularity:
        return tp
    start = tp.start_second()
    if target < tp.granularity:
        return TimePoint(target, _ceil_index(target, start))
    return TimePoint(target, _floor_index(target, start))


# ---------------------------------------------------------------------------
# clocks


class Clock:
    """Source of the current time.  Subclasses provide :meth:`now_seconds`."""

    def now_seconds(self) -> int:
        raise NotImplementedError

    def now_at(self, g: Granularity) -> TimePoint:
        return TimePoint(g, _floor_index(g, self.now_seconds()))

    def pinned(self) -> "FrozenClock":
        """A frozen copy, used so one evaluation sees a single current time."""
        return FrozenClock(self.now_seconds())


class SystemClock(Clock):
    def now_seconds(self) -> int:
        return int(time.time())

    def __repr__(self) -> str:
        return "SystemClock()"


class FrozenClock(Clock):
    def __init__(self, seconds: int):
        self.seconds = int(seconds)

    @classmethod
    def at(cls, tp: TimePoint) -> "FrozenClock":
        return cls(tp.start_second())

    def now_seconds(self) -> int:
        return self.seconds

    def pinned(self) -> "FrozenClock":
        return self

    def __repr__(self) -> str:
        return f"FrozenClock({format_timepoint(TimePoint(Granularity.SECOND, self.seconds))!r})"


def resolve_end(end: EndPoint, g: Granularity, clock: Clock) -> TimePoint:
    if end is NOW:
        return clock.now_at(g)
    if end.granularity is not g:
        raise GranularityMismatch(f"end point at {end.granularity.name}, expected {g.name}")
    return end


# ---------------------------------------------------------------------------
# intervals


class IntervalRelation(enum.Enum):
    BEFORE = "before"
    MEETS = "meets"
    OVERLAPS = "overlaps"
    CONTAINS = "contains"
    CONTAINED_BY = "contained_by"
    EQUALS = "equals"
    # a contains b and they share exactly one endpoint (started-by / finished-by)
    OVERLAPS_FAMILY = "overlaps_family"
    AFTER = "after"
    MET_BY = "met_by"


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval ``[start, end]``; ``end`` may be :data:`NOW`."""

    start: TimePoint
    end: EndPoint = NOW

    def __post_init__(self):
        if self.end is not NOW:
            if self.end.granularity is not self.start.granularity:
                raise GranularityMismatch("interval end points differ in granularity")
            if self.end.index < self.start.index:
                raise InvalidInterval(f"interval end {self.end} precedes start {self.start}")

    @property
    def granularity(self) -> Granularity:
        return self.start.granularity

    def bounds(self, clock: Clock) -> tuple[int, int]:
        """Resolved ``(start, end)`` indices.

        An open interval whose start lies after the clock resolves with
        ``end < start`` and contains no point.
        """
        return self.start.index, resolve_end(self.end, self.granularity, clock).index


def interval_relate(a: Interval, b: Interval, clock: Clock) -> IntervalRelation:
    if a.granularity is not b.granularity:
        raise GranularityMismatch("intervals differ in granularity")
    a0, a1 = a.bounds(clock)
    b0, b1 = b.bounds(clock)
    if a1 + 1 < b0:
        return IntervalRelation.BEFORE
    if a1 + 1 == b0:
        return IntervalRelation.MEETS
    if b1 + 1 < a0:
        return IntervalRelation.AFTER
    if b1 + 1 == a0:
        return IntervalRelation.MET_BY
    if a0 == b0 and a1 == b1:
        return IntervalRelation.EQUALS
    if a0 <= b0 and b1 <= a1:
        if a0 < b0 and b1 < a1:
            return IntervalRelation.CONTAINS
        return IntervalRelation.OVERLAPS_FAMILY
    if b0 <= a0 and a1 <= b1:
        return IntervalRelation.CONTAINED_BY
    return IntervalRelation.OVERLAPS


def interval_contains_point(i: Interval, t: TimePoint, clock: Clock) -> bool:
    if t.granularity is not i.granularity:
        raise GranularityMismatch("point and interval differ in granularity")
    lo, hi = i.bounds(clock)
    return lo <= t.index <= hi


# ---------------------------------------------------------------------------
# text form: DD-MM-YYYY[ HH:MM[:SS]], CURRENT / "Current time" for NOW

NOW_TEXT = "Current time"
_TIME_TEXT = re.compile(r"^(\d{2})-(\d{2})-(\d{4})(?:[ T](\d{2}):(\d{2})(?::(\d{2}))?)?$")


def parse_time_fields(text: str) -> dict[str, int]:
    """Split a textual date-time into calendar fields (no validation of ranges)."""
    m = _TIME_TEXT.match(text.strip())
    if not m:
        raise InvalidDate(f"{text!r} is not a DD-MM-YYYY[ HH:MM] date")
    day, month, year, hour, minute, second = m.groups()
    fields = {"year": int(year), "month": int(month), "day": int(day)}
    if hour is not None:
        fields["hour"] = int(hour)
        fields["minute"] = int(minute)
    if second is not None:
        fields["second"] = int(second)
    return fields


def natural_granularity(fields: dict[str, int]) -> Granularity:
    if "second" in fields:
        return Granularity.SECOND
    if "hour" in fields:
        return Granularity.MINUTE
    return Granularity.DAY


def parse_timepoint(text: str, g: Granularity = Granularity.DAY) -> TimePoint:
    """Parse text as a point exactly at ``g`` (finer fields must be zero)."""
    return make_timepoint(granularity=g, **parse_time_fields(text))


def parse_endpoint(text: str, g: Granularity = Granularity.DAY) -> EndPoint:
    if text.strip() in (NOW_TEXT, "CURRENT", "NOW"):
        return NOW
    return parse_timepoint(text, g)


def format_timepoint(tp: TimePoint) -> str:
    year, month, day, hour, minute, second = tp.fields()
    text = f"{day:02d}-{month:02d}-{year:04d}"
    if tp.granularity is Granularity.SECOND:
        return f"{text} {hour:02d}:{minute:02d}:{second:02d}"
    if tp.granularity <= Granularity.HOUR:
        return f"{text} {hour:02d}:{minute:02d}"
    return text


def format_endpoint(end: EndPoint) -> str:
    return NOW_TEXT if end is NOW else format_timepoint(end)
