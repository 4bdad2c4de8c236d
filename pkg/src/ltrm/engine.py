"""Append-only modification semantics and the derived temporal operators.

Stored tuples never lose their values, ``activation_start`` or
``updatetime``.  The one permitted write is closing an open
``activation_end`` (NOW -> fixed), done by :func:`change` and
:func:`logical_delete`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Mapping, Sequence

from . import kernels
from .chronos import NOW, Clock, EndPoint, Interval, SystemClock, TimePoint
from .constraints import (
    Violation,
    ViolationKind,
    dangling_references,
    group_codes,
    resolved_bounds,
)
from .errors import (
    ConstraintViolation,
    EffectiveBeforeStart,
    GranularityMismatch,
    InvalidInterval,
    NoOpenTuple,
    NotTemporal,
    SchemaError,
    TypeMismatch,
    UnknownAttribute,
)
from .model import (
    ActivationStamp,
    Database,
    RelationSchema,
    RelationStore,
    TemporalTuple,
    value_sort_key,
)


@dataclass(frozen=True)
class SnapshotRelation:
    """Facts valid at one instant; timestamp attributes projected away."""

    schema: RelationSchema
    tuples: tuple[TemporalTuple, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return self.schema.attribute_names

    @property
    def rows(self) -> list[tuple]:
        return [t.row(self.columns) for t in self.tuples]

    def __len__(self) -> int:
        return len(self.tuples)


@dataclass(frozen=True)
class DerivedRelation:
    """Result of timeslice/coalesce: timestamped tuples detached from the store."""

    schema: RelationSchema
    tuples: tuple[TemporalTuple, ...]

    @property
    def columns(self) -> tuple[str, ...]:
        return self.schema.stored_attributes

    @property
    def rows(self) -> list[tuple]:
        return [t.row(self.columns) for t in self.tuples]

    def __len__(self) -> int:
        return len(self.tuples)


def _clock(clock: Clock | None) -> Clock:
    return (clock or SystemClock()).pinned()


def _temporal_store(db: Database, rel: str) -> RelationStore:
    store = db.store(rel)
    if not store.schema.temporal:
        raise NotTemporal(f"{rel} is not a temporal relation")
    return store


def coerce_values(schema: RelationSchema, values: Mapping[str, Any], partial: bool = False) -> dict:
    """Check names, kinds and nullability; returns a fresh dict in schema order."""
    for name in values:
        if not schema.has_attribute(name):
            raise UnknownAttribute(f"{schema.name} has no attribute {name!r}")
    out = {}
    for a in schema.attributes:
        if a.name not in values:
            if partial:
                continue
            if not a.nullable:
                raise TypeMismatch(f"missing value for {schema.name}.{a.name}")
            out[a.name] = None
            continue
        value = values[a.name]
        if value is None:
            if not a.nullable:
                raise TypeMismatch(f"{schema.name}.{a.name} may not be null")
        elif not a.value_type.accepts(value):
            raise TypeMismatch(f"{schema.name}.{a.name} expects {a.value_type.value}, got {value!r}")
        out[a.name] = value
    return out


def _entity(schema: RelationSchema, entity: Mapping[str, Any]) -> tuple:
    missing = [k for k in schema.entity_key if k not in entity]
    if missing:
        raise UnknownAttribute(f"entity of {schema.name} needs {', '.join(missing)}")
    extra = [k for k in entity if k not in schema.entity_key]
    if extra:
        raise UnknownAttribute(f"{', '.join(extra)} not part of the entity key of {schema.name}")
    return tuple(entity[k] for k in schema.entity_key)


def _check_point(schema: RelationSchema, tp: TimePoint, what: str) -> None:
    if not isinstance(tp, TimePoint):
        raise TypeMismatch(f"{what} must be a TimePoint")
    if tp.granularity is not schema.granularity:
        raise GranularityMismatch(
            f"{what} at {tp.granularity.name}, {schema.name} uses {schema.granularity.name}"
        )


def _check_stamp(schema: RelationSchema, stamp: ActivationStamp) -> None:
    _check_point(schema, stamp.activation_start, "activation_start")
    _check_point(schema, stamp.updatetime, "updatetime")
    if stamp.activation_end is not NOW:
        _check_point(schema, stamp.activation_end, "activation_end")
        if stamp.activation_end.index < stamp.activation_start.index:
            raise InvalidInterval("activation_end precedes activation_start")


def _bounds(t: TemporalTuple, now: int) -> tuple[int, int]:
    end = t.stamp.activation_end
    return t.stamp.activation_start.index, now if end is NOW else end.index


def _scoped_violations(
    db: Database,
    store: RelationStore,
    candidate: TemporalTuple,
    clock: Clock,
    replaced: Mapping[int, TemporalTuple] | None = None,
    check_key: bool = True,
) -> list[Violation]:
    """Violations the candidate would introduce against the current store."""
    schema = store.schema
    replaced = replaced or {}
    found = []
    if check_key:
        clash = [t.tuple_id for t in store.with_key(store.key_of(candidate)) if t.tuple_id != candidate.tuple_id]
        if clash:
            found.append(
                Violation(
                    ViolationKind.KEY_UNIQUENESS,
                    schema.name,
                    tuple(clash) + (candidate.tuple_id,),
                    f"duplicate key {store.key_of(candidate)!r}",
                )
            )
    if schema.temporal:
        now = clock.now_at(schema.granularity).index
        c0, c1 = _bounds(candidate, now)
        for other in store.for_entity(store.entity_of(candidate.values)):
            if other.tuple_id == candidate.tuple_id:
                continue
            other = replaced.get(other.tuple_id, other)
            o0, o1 = _bounds(other, now)
            both_open = other.stamp.is_open and candidate.stamp.is_open
            if both_open or (c0 <= c1 and o0 <= o1 and max(c0, o0) <= min(c1, o1)):
                found.append(
                    Violation(
                        ViolationKind.NON_OVERLAP,
                        schema.name,
                        tuple(sorted((other.tuple_id, candidate.tuple_id))),
                        "second open tuple for entity" if both_open else "activation intervals intersect",
                    )
                )
    found.extend(dangling_references(db, schema, candidate))
    return found


def append_row(
    db: Database,
    rel: str,
    values: Mapping[str, Any],
    stamp: ActivationStamp | None = None,
    clock: Clock | None = None,
) -> int:
    """Validate and append one tuple; the raw path used by loaders and :func:`insert`."""
    clock = _clock(clock)
    with db.writing():
        store = db.store(rel)
        schema = store.schema
        row = coerce_values(schema, values)
        if schema.temporal:
            if stamp is None:
                raise SchemaError(f"{rel} is temporal; an activation stamp is required")
            _check_stamp(schema, stamp)
        elif stamp is not None:
            raise NotTemporal(f"{rel} is not temporal; it takes no activation stamp")
        candidate = TemporalTuple(db.next_tuple_id(), row, stamp)
        found = _scoped_violations(db, store, candidate, clock)
        if found:
            raise ConstraintViolation(found)
        store.append(candidate)
        return candidate.tuple_id


def insert(
    db: Database,
    rel: str,
    values: Mapping[str, Any],
    start: TimePoint,
    end: EndPoint = NOW,
    updatetime: TimePoint | None = None,
    clock: Clock | None = None,
) -> int:
    clock = _clock(clock)
    store = _temporal_store(db, rel)
    if updatetime is None:
        updatetime = clock.now_at(store.schema.granularity)
    return append_row(db, rel, values, ActivationStamp(start, end, updatetime), clock)


def _the_open_tuple(store: RelationStore, entity: tuple) -> TemporalTuple:
    open_ = store.open_tuples(entity)
    if not open_:
        raise NoOpenTuple(f"{store.schema.name} has no open tuple for entity {entity!r}")
    if len(open_) > 1:
        raise SchemaError(f"{store.schema.name} has {len(open_)} open tuples for entity {entity!r}")
    return open_[0]


def change(
    db: Database,
    rel: str,
    entity: Mapping[str, Any],
    new_values: Mapping[str, Any],
    effective: TimePoint,
    updatetime: TimePoint | None = None,
    clock: Clock | None = None,
) -> int:
    """Close the entity's open tuple just before ``effective`` and append its successor."""
    clock = _clock(clock)
    with db.writing():
        store = _temporal_store(db, rel)
        schema = store.schema
        key = _entity(schema, entity)
        updates = coerce_values(schema, new_values, partial=True)
        if any(k in schema.entity_key for k in updates):
            raise SchemaError(f"change cannot modify entity key attributes of {rel}")
        _check_point(schema, effective, "effective time")
        if updatetime is None:
            updatetime = clock.now_at(schema.granularity)
        _check_point(schema, updatetime, "updatetime")
        current = _the_open_tuple(store, key)
        if effective.index <= current.stamp.activation_start.index:
            raise EffectiveBeforeStart(
                f"effective time {effective} is not after activation_start {current.stamp.activation_start}"
            )
        closed = current.with_end(effective.predecessor())
        candidate = TemporalTuple(
            db.next_tuple_id(),
            {**current.values, **updates},
            ActivationStamp(effective, NOW, updatetime),
        )
        found = _scoped_violations(db, store, candidate, clock, replaced={closed.tuple_id: closed})
        if found:
            raise ConstraintViolation(found)
        store.close(current.tuple_id, closed.stamp.activation_end)
        store.append(candidate)
        return candidate.tuple_id


def logical_delete(
    db: Database,
    rel: str,
    entity: Mapping[str, Any],
    effective: TimePoint,
    clock: Clock | None = None,
) -> None:
    """End the entity's open tuple at ``effective``; nothing is removed."""
    clock = _clock(clock)
    with db.writing():
        store = _temporal_store(db, rel)
        schema = store.schema
        key = _entity(schema, entity)
        _check_point(schema, effective, "effective time")
        current = _the_open_tuple(store, key)
        if effective.index < current.stamp.activation_start.index:
            raise EffectiveBeforeStart(
                f"effective time {effective} precedes activation_start {current.stamp.activation_start}"
            )
        closed = current.with_end(effective)
        found = _scoped_violations(db, store, closed, clock, check_key=False)
        if found:
            raise ConstraintViolation(found)
        store.close(current.tuple_id, effective)


# ---------------------------------------------------------------------------
# derived operators; the *_tuples variants work on detached tuple sequences


def snapshot_tuples(
    schema: RelationSchema, tuples: Sequence[TemporalTuple], t: TimePoint, clock: Clock
) -> tuple[TemporalTuple, ...]:
    if not schema.temporal:
        return tuple(tuples)
    _check_point(schema, t, "snapshot time")
    starts, ends = resolved_bounds(schema, tuples, clock)
    return tuple(tuples[i] for i in kernels.contains_point(starts, ends, t.index))


def snapshot(db: Database, rel: str, t: TimePoint, clock: Clock | None = None) -> SnapshotRelation:
    schema, tuples = db.lookup(rel)
    return SnapshotRelation(schema, snapshot_tuples(schema, tuples, t, _clock(clock)))


def history_order(schema: RelationSchema):
    def key(t: TemporalTuple):
        return (
            tuple(value_sort_key(v) for v in t.row(schema.entity_key)),
            t.stamp.activation_start.index,
            t.tuple_id,
        )

    return key


def history(db: Database, rel: str, entity: Mapping[str, Any]) -> list[TemporalTuple]:
    with db.writing():
        store = _temporal_store(db, rel)
        rows = store.for_entity(_entity(store.schema, entity))
    return sorted(rows, key=lambda t: (t.stamp.activation_start.index, t.tuple_id))


def timeslice_tuples(
    schema: RelationSchema, tuples: Sequence[TemporalTuple], window: Interval, clock: Clock
) -> tuple[TemporalTuple, ...]:
    if not schema.temporal:
        raise NotTemporal(f"{schema.name} is not a temporal relation")
    if window.granularity is not schema.granularity:
        raise GranularityMismatch(
            f"window at {window.granularity.name}, {schema.name} uses {schema.granularity.name}"
        )
    lo, hi = window.bounds(clock)
    starts, ends = resolved_bounds(schema, tuples, clock)
    g = schema.granularity
    out = []
    for i in kernels.overlapping(starts, ends, lo, hi):
        t = tuples[i]
        start = t.stamp.activation_start if starts[i] >= lo else TimePoint(g, lo)
        end = t.stamp.activation_end if ends[i] <= hi else TimePoint(g, hi)
        out.append(replace(t, stamp=replace(t.stamp, activation_start=start, activation_end=end)))
    return tuple(out)


def timeslice(db: Database, rel: str, window: Interval, clock: Clock | None = None) -> DerivedRelation:
    schema, tuples = db.lookup(rel)
    return DerivedRelation(schema, timeslice_tuples(schema, tuples, window, _clock(clock)))


def coalesce_tuples(
    schema: RelationSchema, tuples: Sequence[TemporalTuple], clock: Clock
) -> tuple[TemporalTuple, ...]:
    """Merge value-equivalent tuples whose intervals overlap or meet."""
    if not schema.temporal:
        raise NotTemporal(f"{schema.name} is not a temporal relation")
    if not tuples:
        return ()
    names = schema.attribute_names
    starts, ends = resolved_bounds(schema, tuples, clock)
    groups = group_codes(t.row(names) for t in tuples)
    run_of, run_starts, run_ends = kernels.coalesce_runs(groups, starts, ends)
    members: dict[int, list[int]] = {}
    for i, run in enumerate(run_of):
        members.setdefault(run, []).append(i)
    g = schema.granularity
    out = []
    for run, idx in members.items():
        if len(idx) == 1:
            out.append(tuples[idx[0]])
            continue
        first = min(idx, key=lambda i: tuples[i].tuple_id)
        open_at_end = any(
            tuples[i].stamp.activation_end is NOW and ends[i] == run_ends[run] for i in idx
        )
        stamp = ActivationStamp(
            TimePoint(g, run_starts[run]),
            NOW if open_at_end else TimePoint(g, run_ends[run]),
            max((tuples[i].stamp.updatetime for i in idx), key=lambda tp: tp.index),
        )
        out.append(replace(tuples[first], stamp=stamp))
    out.sort(key=history_order(schema))
    return tuple(out)


def coalesce(db: Database, rel: str, clock: Clock | None = None) -> DerivedRelation:
    schema, tuples = db.lookup(rel)
    return DerivedRelation(schema, coalesce_tuples(schema, tuples, _clock(clock)))
