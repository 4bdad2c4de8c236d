"""Embedded temporal relational engine.

Relations are tuple-timestamped with ``activation_start``,
``activation_end`` and ``updatetime``; modifications append rather than
overwrite, and TQL queries read snapshots, timeslices and histories.
"""

from .chronos import (
    NOW,
    Clock,
    FrozenClock,
    Granularity,
    Interval,
    IntervalRelation,
    SystemClock,
    TimePoint,
    convert,
    interval_contains_point,
    interval_relate,
    make_timepoint,
    parse_timepoint,
    resolve_end,
)
from .constraints import (
    Report,
    Violation,
    ViolationKind,
    check_key_uniqueness,
    check_non_overlap,
    check_referential_integrity,
    validate_database,
)
from .engine import (
    append_row,
    change,
    coalesce,
    history,
    insert,
    logical_delete,
    snapshot,
    timeslice,
)
from .model import (
    ActivationStamp,
    AttributeDef,
    Database,
    ForeignKey,
    Money,
    RelationSchema,
    TemporalTuple,
    ValueType,
    define_relation,
    lookup,
)
from .storage import load_catalog, load_csv, load_database, load_fixture, save_database
from .tql import evaluate, parse, print_ast, render_result

__version__ = "0.1.0"
