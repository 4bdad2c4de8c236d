"""Evaluate a parsed query against a database.

AS OF and the default clause go through snapshots, DURING through
timeslice and HISTORY through the (optionally coalesced) full tuple
history.  Only the snapshot forms support JOIN.
"""

from __future__ import annotations

import operator
from typing import Any, Sequence

from ..chronos import NOW, Clock, Granularity, Interval, SystemClock, TimePoint, convert, make_timepoint, natural_granularity
from ..engine import coalesce_tuples, history_order, snapshot_tuples, timeslice_tuples
from ..errors import TemporalClauseOnSnapshotRelation, TypeMismatch, UnknownAttribute, UnsupportedQuery
from ..model import TIMESTAMP_ATTRIBUTES, Database, Money, RelationSchema, TemporalTuple, ValueType
from .ast import AsOf, Comparison, During, History, Query
from .parser import parse
from .render import ResultTable

_OPS = {
    "=": operator.eq,
    "<>": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}

_PY_TYPES = {
    ValueType.INTEGER: int,
    ValueType.TEXT: str,
    ValueType.MONEY: Money,
    ValueType.DATE: TimePoint,
}


def resolve_time_literal(lit, g: Granularity, clock: Clock) -> TimePoint:
    """A query time literal as a point at ``g`` (CURRENT reads the clock)."""
    if lit is NOW:
        return clock.now_at(g)
    fields = lit.fields()
    natural = make_timepoint(granularity=natural_granularity(fields), **fields)
    return convert(natural, g)


def _find(name: str, columns: Sequence[str]) -> str:
    if name in columns:
        return name
    matches = [c for c in columns if c.lower() == name.lower()]
    if len(matches) == 1:
        return matches[0]
    raise UnknownAttribute(f"unknown attribute {name!r}; available: {', '.join(columns)}")


class _Filter:
    def __init__(self, comparisons: Sequence[Comparison], types: dict[str, Any], granularity, clock):
        self.checks = []
        for c in comparisons:
            column = _find(c.attribute, list(types))
            expected = types[column]
            if not isinstance(c.value, expected) or isinstance(c.value, bool):
                raise TypeMismatch(
                    f"{column} compares against {expected.__name__}, got literal {c.value!r}"
                )
            self.checks.append((column, _OPS[c.op], c.value))
        self.granularity = granularity
        self.clock = clock

    def _coerce(self, value, literal):
        if value is NOW:
            value = self.clock.now_at(self.granularity)
        if isinstance(value, TimePoint) and value.granularity is not literal.granularity:
            literal = convert(literal, value.granularity)
        return value, literal

    def __call__(self, row: dict) -> bool:
        for column, op, literal in self.checks:
            value = row[column]
            if value is None:
                return False
            if isinstance(literal, TimePoint):
                value, literal = self._coerce(value, literal)
            if not op(value, literal):
                return False
        return True


def _types(schema: RelationSchema, with_stamps: bool) -> dict[str, Any]:
    out = {a.name: _PY_TYPES[a.value_type] for a in schema.attributes}
    if with_stamps and schema.temporal:
        out.update({name: TimePoint for name in TIMESTAMP_ATTRIBUTES})
    return out


def _project(query: Query, columns: Sequence[str], rows: list[dict]) -> ResultTable:
    if query.projection is None:
        selected = list(columns)
    else:
        selected = [_find(name, columns) for name in query.projection]
    return ResultTable(tuple(selected), [tuple(r[c] for c in selected) for r in rows])


def _snapshot_side(db: Database, name: str, temporal, clock: Clock):
    schema, tuples = db.lookup(name)
    if schema.temporal:
        at = NOW if temporal is None else temporal.at
        tuples = snapshot_tuples(schema, tuples, resolve_time_literal(at, schema.granularity, clock), clock)
    return schema, tuples


def evaluate(query: Query | str, db: Database, clock: Clock | None = None) -> ResultTable:
    if isinstance(query, str):
        query = parse(query)
    clock = (clock or SystemClock()).pinned()
    source = db.resolve_name(query.source)
    schema, tuples = db.lookup(source)
    clause = query.temporal

    join_schema = None
    if query.join is not None:
        join_schema = db.lookup(db.resolve_name(query.join.relation))[0]
    any_temporal = schema.temporal or (join_schema is not None and join_schema.temporal)
    if clause is not None and not any_temporal:
        raise TemporalClauseOnSnapshotRelation(
            f"{source} is not temporal; drop the temporal clause"
        )

    if isinstance(clause, (During, History)):
        if query.join is not None:
            raise UnsupportedQuery("JOIN is only supported with AS OF or the default clause")
        if not schema.temporal:
            raise TemporalClauseOnSnapshotRelation(f"{source} is not temporal")
        g = schema.granularity
        row_filter = _Filter(query.predicate, _types(schema, True), g, clock)
        if isinstance(clause, During):
            window = Interval(
                resolve_time_literal(clause.start, g, clock),
                NOW if clause.end is NOW else resolve_time_literal(clause.end, g, clock),
            )
            selected: Sequence[TemporalTuple] = timeslice_tuples(schema, tuples, window, clock)
        elif clause.coalesced:
            selected = coalesce_tuples(schema, tuples, clock)
        else:
            selected = sorted(tuples, key=history_order(schema))
        columns = schema.stored_attributes
        rows = [dict(zip(columns, t.row(columns))) for t in selected]
        return _project(query, columns, [r for r in rows if row_filter(r)])

    schema, left = _snapshot_side(db, source, clause, clock)
    columns = list(schema.attribute_names)
    types = _types(schema, False)
    rows = [dict(zip(columns, t.row(columns))) for t in left]

    if query.join is not None:
        right_name = db.resolve_name(query.join.relation)
        right_schema, right = _snapshot_side(db, right_name, clause, clock)
        right_columns = right_schema.attribute_names
        left_attr, right_attr = query.join.left, query.join.right
        try:
            left_attr = _find(left_attr, columns)
            right_attr = _find(right_attr, right_columns)
        except UnknownAttribute:
            left_attr = _find(query.join.right, columns)
            right_attr = _find(query.join.left, right_columns)
        index: dict[Any, list[TemporalTuple]] = {}
        for t in right:
            index.setdefault(t.get(right_attr), []).append(t)
        extra = [c for c in right_columns if c not in columns]
        joined = []
        for row in rows:
            key = row[left_attr]
            if key is None:
                continue
            for t in index.get(key, ()):
                joined.append({**row, **{c: t.get(c) for c in extra}})
        rows = joined
        for c in extra:
            types[c] = _PY_TYPES[right_schema.attribute(c).value_type]
        columns += extra

    row_filter = _Filter(query.predicate, types, schema.granularity, clock)
    return _project(query, columns, [r for r in rows if row_filter(r)])
