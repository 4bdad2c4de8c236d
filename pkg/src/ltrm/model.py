"""Values, relation schemas, timestamped tuples and the database catalog."""

from __future__ import annotations

import enum
import re
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Union

from .chronos import (
    NOW,
    EndPoint,
    Granularity,
    TimePoint,
    format_endpoint,
    format_timepoint,
)
from .errors import (
    DuplicateRelation,
    EmptyEntityKey,
    KeyMissingActivationStart,
    ReservedAttributeName,
    SchemaError,
    TypeMismatch,
    UnknownForeignTarget,
    UnknownRelation,
)

ACTIVATION_START = "activation_start"
ACTIVATION_END = "activation_end"
UPDATETIME = "updatetime"
TIMESTAMP_ATTRIBUTES = (ACTIVATION_START, ACTIVATION_END, UPDATETIME)

DEFAULT_GRANULARITY = Granularity.MINUTE


@dataclass(frozen=True, slots=True, order=True)
class Money:
    """Integer amount with a currency tag; rendered like ``Rs. 900``."""

    amount: int
    currency: str = "Rs"

    def __str__(self) -> str:
        return f"{self.currency}. {self.amount}"

    def literal(self) -> str:
        return f"{self.currency}.{self.amount}"


_MONEY_TEXT = re.compile(r"^([A-Za-z]+)\.\s?(-?\d+)$")


def parse_money(text: str) -> Money:
    m = _MONEY_TEXT.match(text.strip())
    if not m:
        raise TypeMismatch(f"{text!r} is not a money value (expected Rs.<int>)")
    return Money(int(m.group(2)), m.group(1))


# Null is represented by None.
Value = Union[int, str, Money, TimePoint, None]


class ValueType(enum.Enum):
    INTEGER = "INTEGER"
    TEXT = "TEXT"
    MONEY = "MONEY"
    DATE = "DATE"

    def accepts(self, value: Any) -> bool:
        if self is ValueType.INTEGER:
            return isinstance(value, int) and not isinstance(value, bool)
        if self is ValueType.TEXT:
            return isinstance(value, str)
        if self is ValueType.MONEY:
            return isinstance(value, Money)
        return isinstance(value, TimePoint) and value.granularity is Granularity.DAY


def render_value(value: Any) -> str:
    if value is None:
        return ""
    if value is NOW:
        return format_endpoint(value)
    if isinstance(value, TimePoint):
        return format_timepoint(value)
    return str(value)


def value_sort_key(value: Any) -> tuple:
    """Total order over mixed values; Null sorts first."""
    if value is None:
        return (0,)
    if value is NOW:
        return (5,)
    if isinstance(value, int):
        return (1, value)
    if isinstance(value, str):
        return (2, value)
    if isinstance(value, Money):
        return (3, value.currency, value.amount)
    return (4, int(value.granularity), value.index)


@dataclass(frozen=True, slots=True)
class AttributeDef:
    name: str
    value_type: ValueType
    nullable: bool = False


@dataclass(frozen=True, slots=True)
class ForeignKey:
    attributes: tuple[str, ...]
    target: str
    target_attributes: tuple[str, ...]


class Classification(enum.Enum):
    SNAPSHOT = "non-temporal"
    TEMPORAL = "temporal"
    # accepted as a label only; behaves like SNAPSHOT
    SEMI_TEMPORAL = "semi-temporal"


@dataclass(frozen=True)
class RelationSchema:
    """Schema ``<A, K>`` of a relation.

    ``attributes`` lists user attributes only; temporal relations store the
    three timestamp attributes after them (see :attr:`stored_attributes`).
    """

    name: str
    attributes: tuple[AttributeDef, ...]
    key: tuple[str, ...]
    temporal: bool = False
    entity_key: tuple[str, ...] = ()
    granularity: Granularity = DEFAULT_GRANULARITY
    foreign_keys: tuple[ForeignKey, ...] = ()
    classification: Classification | None = None

    def __post_init__(self):
        if self.classification is None:
            label = Classification.TEMPORAL if self.temporal else Classification.SNAPSHOT
            object.__setattr__(self, "classification", label)

    @property
    def attribute_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attributes)

    @property
    def stored_attributes(self) -> tuple[str, ...]:
        if self.temporal:
            return self.attribute_names + TIMESTAMP_ATTRIBUTES
        return self.attribute_names

    def attribute(self, name: str) -> AttributeDef:
        for a in self.attributes:
            if a.name == name:
                return a
        raise KeyError(name)

    def has_attribute(self, name: str) -> bool:
        return any(a.name == name for a in self.attributes)

    @property
    def value_key(self) -> tuple[str, ...]:
        """Key attributes excluding ``activation_start``."""
        return tuple(k for k in self.key if k != ACTIVATION_START)


@dataclass(frozen=True, slots=True)
class ActivationStamp:
    activation_start: TimePoint
    activation_end: EndPoint
    updatetime: TimePoint

    @property
    def is_open(self) -> bool:
        return self.activation_end is NOW


@dataclass(frozen=True, slots=True)
class TemporalTuple:
    """One stored row.  ``stamp`` is None for non-temporal relations."""

    tuple_id: int
    values: Mapping[str, Value]
    stamp: ActivationStamp | None = None

    def get(self, name: str) -> Any:
        if self.stamp is not None:
            if name == ACTIVATION_START:
                return self.stamp.activation_start
            if name == ACTIVATION_END:
                return self.stamp.activation_end
            if name == UPDATETIME:
                return self.stamp.updatetime
        return self.values[name]

    def row(self, names: Iterable[str]) -> tuple:
        return tuple(self.get(n) for n in names)

    def with_end(self, end: EndPoint) -> "TemporalTuple":
        return replace(self, stamp=replace(self.stamp, activation_end=end))


def validate_schema(schema: RelationSchema, catalog: Mapping[str, RelationSchema]) -> None:
    """Check every schema rule; raises a :class:`SchemaError` subclass."""
    if schema.name in catalog:
        raise DuplicateRelation(f"relation {schema.name!r} already exists")
    seen = set()
    for a in schema.attributes:
        if a.name in TIMESTAMP_ATTRIBUTES:
            raise ReservedAttributeName(f"{a.name!r} is a reserved timestamp attribute")
        if a.name in seen:
            raise SchemaError(f"duplicate attribute {a.name!r} in {schema.name}")
        seen.add(a.name)
    if len(set(schema.key)) != len(schema.key):
        raise SchemaError(f"duplicate name in key of {schema.name}")

    if schema.temporal:
        if ACTIVATION_START not in schema.key:
            raise KeyMissingActivationStart(
                f"key of temporal relation {schema.name} must contain {ACTIVATION_START}"
            )
        for k in schema.key:
            if k not in seen and k != ACTIVATION_START:
                raise SchemaError(f"key attribute {k!r} not declared in {schema.name}")
        if not schema.entity_key:
            raise EmptyEntityKey(f"temporal relation {schema.name} needs an ENTITY KEY")
        for k in schema.entity_key:
            if k not in schema.key or k == ACTIVATION_START:
                raise SchemaError(
                    f"entity key attribute {k!r} must be a key attribute other than {ACTIVATION_START}"
                )
    else:
        if not schema.key:
            raise SchemaError(f"relation {schema.name} needs a non-empty KEY")
        for k in schema.key:
            if k in TIMESTAMP_ATTRIBUTES:
                raise ReservedAttributeName(f"non-temporal relation {schema.name} cannot key on {k}")
            if k not in seen:
                raise SchemaError(f"key attribute {k!r} not declared in {schema.name}")
        if schema.entity_key:
            raise SchemaError(f"ENTITY KEY is only meaningful for temporal relations ({schema.name})")

    for fk in schema.foreign_keys:
        target = schema if fk.target == schema.name else catalog.get(fk.target)
        if target is None:
            raise UnknownForeignTarget(f"{schema.name} references unknown relation {fk.target!r}")
        if len(fk.attributes) != len(fk.target_attributes) or not fk.attributes:
            raise SchemaError(f"foreign key of {schema.name} has mismatched attribute lists")
        for local, remote in zip(fk.attributes, fk.target_attributes):
            if local not in seen:
                raise SchemaError(f"foreign key attribute {local!r} not declared in {schema.name}")
            if not target.has_attribute(remote):
                raise UnknownForeignTarget(f"{fk.target} has no attribute {remote!r}")
            if schema.attribute(local).value_type is not target.attribute(remote).value_type:
                raise SchemaError(
                    f"foreign key {schema.name}.{local} -> {fk.target}.{remote} joins different types"
                )


class RelationStore:
    """Append-only tuple sequence of one relation plus its lookup indexes."""

    def __init__(self, schema: RelationSchema):
        self.schema = schema
        self.tuples: list[TemporalTuple] = []
        self._position: dict[int, int] = {}
        self._by_key: dict[tuple, list[int]] = {}
        self._by_entity: dict[tuple, list[int]] = {}
        self._value_sets: dict[tuple[str, ...], set[tuple]] = {}

    def __len__(self) -> int:
        return len(self.tuples)

    def key_of(self, t: TemporalTuple) -> tuple:
        return t.row(self.schema.key)

    def entity_of(self, values: Mapping[str, Any]) -> tuple:
        return tuple(values[k] for k in self.schema.entity_key)

    def with_key(self, key: tuple) -> list[TemporalTuple]:
        return [self.tuples[p] for p in self._by_key.get(key, ())]

    def for_entity(self, entity: tuple) -> list[TemporalTuple]:
        return [self.tuples[p] for p in self._by_entity.get(entity, ())]

    def open_tuples(self, entity: tuple) -> list[TemporalTuple]:
        return [t for t in self.for_entity(entity) if t.stamp.activation_end is NOW]

    def value_set(self, attrs: tuple[str, ...]) -> set[tuple]:
        cached = self._value_sets.get(attrs)
        if cached is None:
            cached = {t.row(attrs) for t in self.tuples}
            self._value_sets[attrs] = cached
        return cached

    def append(self, t: TemporalTuple) -> None:
        pos = len(self.tuples)
        self.tuples.append(t)
        self._position[t.tuple_id] = pos
        self._by_key.setdefault(self.key_of(t), []).append(pos)
        if self.schema.temporal:
            self._by_entity.setdefault(self.entity_of(t.values), []).append(pos)
        for attrs, values in self._value_sets.items():
            values.add(t.row(attrs))

    def close(self, tuple_id: int, end: TimePoint) -> TemporalTuple:
        """The single permitted in-place write: NOW -> fixed activation_end."""
        pos = self._position[tuple_id]
        old = self.tuples[pos]
        if old.stamp.activation_end is not NOW:
            raise SchemaError(f"tuple {tuple_id} is already closed")
        closed = old.with_end(end)
        self.tuples[pos] = closed
        return closed


class Database:
    """Named relations with their stores.

    Mutations go through :meth:`writing`, a single-writer gate; readers can
    take :meth:`view` between writes to get an immutable picture.
    """

    def __init__(self, default_granularity: Granularity = DEFAULT_GRANULARITY):
        self.default_granularity = default_granularity
        self.stores: dict[str, RelationStore] = {}
        self._next_id = 1
        self._gate = threading.RLock()

    @property
    def catalog(self) -> dict[str, RelationSchema]:
        return {name: store.schema for name, store in self.stores.items()}

    @contextmanager
    def writing(self):
        with self._gate:
            yield self

    def next_tuple_id(self) -> int:
        tid = self._next_id
        self._next_id += 1
        return tid

    def define_relation(self, schema: RelationSchema) -> "Database":
        with self.writing():
            validate_schema(schema, self.catalog)
            self.stores[schema.name] = RelationStore(schema)
        return self

    def store(self, name: str) -> RelationStore:
        try:
            return self.stores[name]
        except KeyError:
            raise UnknownRelation(f"no relation named {name!r}") from None

    def resolve_name(self, name: str) -> str:
        """Exact match first, then a unique case-insensitive match."""
        if name in self.stores:
            return name
        matches = [n for n in self.stores if n.lower() == name.lower()]
        if len(matches) == 1:
            return matches[0]
        raise UnknownRelation(f"no relation named {name!r}")

    def lookup(self, name: str) -> tuple[RelationSchema, tuple[TemporalTuple, ...]]:
        with self._gate:
            store = self.store(name)
            return store.schema, tuple(store.tuples)

    def view(self) -> dict[str, tuple[RelationSchema, tuple[TemporalTuple, ...]]]:
        with self._gate:
            return {name: (s.schema, tuple(s.tuples)) for name, s in self.stores.items()}

    def __contains__(self, name: str) -> bool:
        return name in self.stores

    def __repr__(self) -> str:
        return f"Database({', '.join(f'{n}[{len(s)}]' for n, s in self.stores.items())})"


def define_relation(db: Database, decl: RelationSchema) -> Database:
    return db.define_relation(decl)


def lookup(db: Database, name: str) -> tuple[RelationSchema, tuple[TemporalTuple, ...]]:
    return db.lookup(name)
