"""Query AST.  Every node is a frozen dataclass so ASTs compare by value."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..chronos import NOW, _Now
from ..model import Value


@dataclass(frozen=True)
class DateTimeLiteral:
    year: int
    month: int
    day: int
    hour: int | None = None
    minute: int | None = None

    def fields(self) -> dict[str, int]:
        out = {"year": self.year, "month": self.month, "day": self.day}
        if self.hour is not None:
            out["hour"] = self.hour
            out["minute"] = self.minute
        return out


# CURRENT is represented by chronos.NOW
TimeLiteral = Union[DateTimeLiteral, _Now]

OPERATORS = ("=", "<>", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Comparison:
    attribute: str
    op: str
    value: Value


@dataclass(frozen=True)
class Join:
    relation: str
    left: str
    right: str


@dataclass(frozen=True)
class AsOf:
    at: TimeLiteral


@dataclass(frozen=True)
class During:
    start: TimeLiteral
    end: TimeLiteral


@dataclass(frozen=True)
class History:
    coalesced: bool = False


TemporalClause = Union[AsOf, During, History]


@dataclass(frozen=True)
class Query:
    """``projection`` is None for ``*``; ``temporal`` is None for the default clause."""

    projection: tuple[str, ...] | None
    source: str
    join: Join | None = None
    predicate: tuple[Comparison, ...] = ()
    temporal: TemporalClause | None = None


__all__ = [
    "NOW",
    "AsOf",
    "Comparison",
    "DateTimeLiteral",
    "During",
    "History",
    "Join",
    "OPERATORS",
    "Query",
    "TemporalClause",
    "TimeLiteral",
]
