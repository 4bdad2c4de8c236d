"""Canonical query text and result rendering (table, csv, json)."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ..chronos import NOW, TimePoint, format_timepoint
from ..model import Money, render_value
from .ast import AsOf, Comparison, DateTimeLiteral, During, History, Query

FORMATS = ("table", "csv", "json")


def _literal(value) -> str:
    if isinstance(value, bool):
        raise TypeError("booleans are not TQL literals")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return "'" + value.replace("'", "''") + "'"
    if isinstance(value, Money):
        return value.literal()
    if isinstance(value, TimePoint):
        return format_timepoint(value)
    raise TypeError(f"cannot print literal {value!r}")


def _time_literal(lit) -> str:
    if lit is NOW:
        return "CURRENT"
    text = f"{lit.day:02d}-{lit.month:02d}-{lit.year:04d}"
    if lit.hour is not None:
        text += f" {lit.hour:02d}:{lit.minute:02d}"
    return text


def print_ast(query: Query) -> str:
    parts = ["SELECT", "*" if query.projection is None else ", ".join(query.projection)]
    parts += ["FROM", query.source]
    if query.join is not None:
        j = query.join
        parts += ["JOIN", j.relation, "ON", j.left, "=", j.right]
    if query.predicate:
        parts.append("WHERE")
        parts.append(" AND ".join(f"{c.attribute} {c.op} {_literal(c.value)}" for c in query.predicate))
    t = query.temporal
    if isinstance(t, AsOf):
        parts += ["AS OF", _time_literal(t.at)]
    elif isinstance(t, During):
        parts.append(f"DURING [{_time_literal(t.start)}, {_time_literal(t.end)}]")
    elif isinstance(t, History):
        parts.append("HISTORY COALESCED" if t.coalesced else "HISTORY")
    return " ".join(parts)


@dataclass
class ResultTable:
    columns: tuple[str, ...]
    rows: list[tuple] = field(default_factory=list)

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def rendered_rows(self) -> list[list[str]]:
        return [[render_value(v) for v in row] for row in self.rows]


def _json_value(value):
    if value is None or (isinstance(value, int) and not isinstance(value, bool)):
        return value
    return render_value(value)


def render_result(rt: ResultTable, fmt: str = "table") -> str:
    if fmt == "table":
        cells = rt.rendered_rows()
        widths = [len(c) for c in rt.columns]
        for row in cells:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]

        def line(values):
            return " | ".join(v.ljust(w) for v, w in zip(values, widths)).rstrip()

        out = [line(rt.columns), "-+-".join("-" * w for w in widths)]
        out.extend(line(row) for row in cells)
        return "\n".join(out) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rt.columns)
        writer.writerows(rt.rendered_rows())
        return buf.getvalue()
    if fmt == "json":
        records = [{c: _json_value(v) for c, v in zip(rt.columns, row)} for row in rt.rows]
        return json.dumps(records, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}; choose one of {', '.join(FORMATS)}")
