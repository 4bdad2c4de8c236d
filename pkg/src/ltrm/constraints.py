"""Integrity rules: key uniqueness, per-entity non-overlap, referential integrity."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from . import kernels
from .chronos import NOW, Clock, SystemClock
from .errors import LTRMError
from .model import Database, RelationSchema, TemporalTuple, validate_schema


class ViolationKind(enum.Enum):
    KEY_UNIQUENESS = "KeyUniqueness"
    NON_OVERLAP = "NonOverlap"
    REFERENTIAL_INTEGRITY = "ReferentialIntegrity"
    SCHEMA_RULE = "SchemaRule"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    relation: str
    tuple_ids: tuple[int, ...]
    detail: str = ""

    def describe(self) -> str:
        ids = ",".join(map(str, self.tuple_ids))
        return f"{self.kind.value} in {self.relation} [{ids}]: {self.detail}"

    def row(self) -> tuple[str, str, str]:
        return self.kind.value, self.relation, " ".join(map(str, self.tuple_ids))


class Report:
    """Ordered list of violations with text and row renderings."""

    def __init__(self, violations: Iterable[Violation] = ()):
        self.violations = list(violations)

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def __bool__(self) -> bool:
        return bool(self.violations)

    def rows(self) -> list[tuple[str, str, str]]:
        return [v.row() for v in self.violations]

    def text(self) -> str:
        n = len(self.violations)
        lines = [f"{n} violation{'' if n == 1 else 's'}"]
        lines.extend(v.describe() for v in self.violations)
        return "\n".join(lines)


def resolved_bounds(schema: RelationSchema, tuples: Sequence[TemporalTuple], clock: Clock):
    """Activation intervals as two ``array('q')``; NOW resolves to the clock."""
    now = clock.now_at(schema.granularity).index
    starts = kernels.int_array(t.stamp.activation_start.index for t in tuples)
    ends = kernels.int_array(
        now if t.stamp.activation_end is NOW else t.stamp.activation_end.index for t in tuples
    )
    return starts, ends


def group_codes(keys: Iterable[tuple]) -> kernels.array:
    """Dense integer codes for hashable group keys, in first-seen order."""
    codes: dict[tuple, int] = {}
    return kernels.int_array(codes.setdefault(k, len(codes)) for k in keys)


def check_key_uniqueness(schema: RelationSchema, tuples: Sequence[TemporalTuple]) -> list[Violation]:
    by_key: dict[tuple, list[int]] = {}
    for t in tuples:
        by_key.setdefault(t.row(schema.key), []).append(t.tuple_id)
    out = []
    for key, ids in by_key.items():
        for a, b in combinations(sorted(ids), 2):
            out.append(
                Violation(ViolationKind.KEY_UNIQUENESS, schema.name, (a, b), f"duplicate key {key!r}")
            )
    return out


def check_non_overlap(
    schema: RelationSchema, tuples: Sequence[TemporalTuple], clock: Clock | None = None
) -> list[Violation]:
    if not schema.temporal or not tuples:
        return []
    clock = (clock or SystemClock()).pinned()
    starts, ends = resolved_bounds(schema, tuples, clock)
    groups = group_codes(t.row(schema.entity_key) for t in tuples)
    out = []
    for i, j in kernels.overlap_pairs(groups, starts, ends):
        a, b = sorted((tuples[i].tuple_id, tuples[j].tuple_id))
        entity = tuples[i].row(schema.entity_key)
        out.append(
            Violation(
                ViolationKind.NON_OVERLAP,
                schema.name,
                (a, b),
                f"activation intervals of entity {entity!r} intersect",
            )
        )
    out.sort(key=lambda v: v.tuple_ids)
    return out


def dangling_references(
    db: Database, schema: RelationSchema, t: TemporalTuple
) -> list[Violation]:
    out = []
    for fk in schema.foreign_keys:
        local = t.row(fk.attributes)
        if any(v is None for v in local):
            continue
        if local not in db.store(fk.target).value_set(fk.target_attributes):
            out.append(
                Violation(
                    ViolationKind.REFERENTIAL_INTEGRITY,
                    schema.name,
                    (t.tuple_id,),
                    f"{schema.name}({', '.join(fk.attributes)}) -> "
                    f"{fk.target}({', '.join(fk.target_attributes)}): no match for {local!r}",
                )
            )
    return out


def check_referential_integrity(db: Database, clock: Clock | None = None) -> list[Violation]:
    # Value inclusion only; clock accepted for a uniform checker signature.
    out = []
    for name in sorted(db.stores):
        store = db.stores[name]
        for t in store.tuples:
            out.extend(dangling_references(db, store.schema, t))
    return out


def check_schema_rules(db: Database) -> list[Violation]:
    """Re-verify schemas and per-tuple typing/stamp rules."""
    out = []
    catalog = db.catalog
    for name in sorted(catalog):
        schema = catalog[name]
        others = {n: s for n, s in catalog.items() if n != name}
        try:
            validate_schema(schema, others)
        except LTRMError as exc:
            out.append(Violation(ViolationKind.SCHEMA_RULE, name, (), str(exc)))
        for t in db.stores[name].tuples:
            problem = tuple_problem(schema, t)
            if problem:
                out.append(Violation(ViolationKind.SCHEMA_RULE, name, (t.tuple_id,), problem))
    return out


def tuple_problem(schema: RelationSchema, t: TemporalTuple) -> str | None:
    for a in schema.attributes:
        value = t.values.get(a.name)
        if value is None:
            if not a.nullable:
                return f"{a.name} is null"
        elif not a.value_type.accepts(value):
            return f"{a.name}={value!r} is not {a.value_type.value}"
    if schema.temporal:
        stamp = t.stamp
        if stamp is None:
            return "missing activation stamp"
        points = [stamp.activation_start, stamp.updatetime]
        if stamp.activation_end is not NOW:
            points.append(stamp.activation_end)
        if any(p.granularity is not schema.granularity for p in points):
            return f"timestamp not at {schema.granularity.name} granularity"
        if stamp.activation_end is not NOW and stamp.activation_end.index < stamp.activation_start.index:
            return "activation_end precedes activation_start"
    elif t.stamp is not None:
        return "non-temporal tuple carries an activation stamp"
    return None


_KIND_ORDER = {k: n for n, k in enumerate(ViolationKind)}


def validate_database(db: Database, clock: Clock | None = None) -> Report:
    clock = (clock or SystemClock()).pinned()
    with db.writing():
        found = check_schema_rules(db)
        for name in sorted(db.stores):
            schema, tuples = db.stores[name].schema, db.stores[name].tuples
            found.extend(check_key_uniqueness(schema, tuples))
            found.extend(check_non_overlap(schema, tuples, clock))
        found.extend(check_referential_integrity(db, clock))
    found.sort(key=lambda v: (v.relation, v.tuple_ids[:1] or (0,), _KIND_ORDER[v.kind], v.tuple_ids))
    return Report(found)
