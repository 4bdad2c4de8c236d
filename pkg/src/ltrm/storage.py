"""Catalog DSL, CSV fixtures and directory persistence.

Catalog statements look like::

    TEMPORAL RELATION Salary (empno INTEGER, salary MONEY)
        KEY (empno, salary, activation_start)
        ENTITY KEY (empno)
        GRANULARITY DAY
        FK (empno) REFERENCES Employee (empno);

``#`` starts a comment.  A saved database directory holds ``catalog.ltrm``
plus one ``<Relation>.csv`` per relation.
"""

from __future__ import annotations

import csv
import io
import re
import warnings
from pathlib import Path

from .chronos import NOW, Clock, Granularity, SystemClock, format_endpoint, format_timepoint, parse_endpoint, parse_timepoint
from .engine import append_row
from .errors import CatalogSyntaxError, CsvFormatError, LTRMError, StorageError, TypeMismatch
from .model import (
    ACTIVATION_END,
    ACTIVATION_START,
    UPDATETIME,
    ActivationStamp,
    AttributeDef,
    Classification,
    Database,
    ForeignKey,
    Money,
    RelationSchema,
    ValueType,
    parse_money,
)

CATALOG_FILE = "catalog.ltrm"
FIXTURE_DIR = Path(__file__).parent / "fixtures"

_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<word>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[(),;])")


def _catalog_tokens(text: str):
    pos, line = 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise CatalogSyntaxError(f"unexpected character {text[pos]!r}").with_line(line)
        value = m.group("word") or m.group("punct")
        if value:
            yield value, line
        line += m.group(0).count("\n")
        pos = m.end()


class _CatalogParser:
    def __init__(self, text: str):
        self.tokens = list(_catalog_tokens(text))
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def line(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return self.tokens[-1][1] if self.tokens else 1

    def take(self) -> str:
        if self.pos >= len(self.tokens):
            raise CatalogSyntaxError("unexpected end of catalog").with_line(self.line())
        value = self.tokens[self.pos][0]
        self.pos += 1
        return value

    def keyword(self, *words: str) -> bool:
        value = self.peek()
        return value is not None and value.upper() in words

    def expect(self, word: str) -> None:
        line = self.line()
        value = self.take()
        if value.upper() != word:
            raise CatalogSyntaxError(f"expected {word}, found {value!r}").with_line(line)

    def ident(self) -> str:
        line = self.line()
        value = self.take()
        if not re.match(r"[A-Za-z_]", value):
            raise CatalogSyntaxError(f"expected a name, found {value!r}").with_line(line)
        return value

    def name_list(self) -> tuple[str, ...]:
        self.expect("(")
        names = [self.ident()]
        while self.peek() == ",":
            self.take()
            names.append(self.ident())
        self.expect(")")
        return tuple(names)

    def attribute(self) -> AttributeDef:
        name = self.ident()
        line = self.line()
        type_name = self.take().upper()
        try:
            value_type = ValueType(type_name)
        except ValueError:
            raise CatalogSyntaxError(f"unknown type {type_name!r}").with_line(line) from None
        nullable = False
        if self.keyword("NULL"):
            self.take()
            nullable = True
        return AttributeDef(name, value_type, nullable)

    def statement(self) -> RelationSchema:
        classification = Classification.SNAPSHOT
        if self.keyword("TEMPORAL"):
            self.take()
            classification = Classification.TEMPORAL
        elif self.keyword("SEMI"):
            self.take()
            self.expect("TEMPORAL")
            classification = Classification.SEMI_TEMPORAL
        elif self.keyword("SEMITEMPORAL"):
            self.take()
            classification = Classification.SEMI_TEMPORAL
        self.expect("RELATION")
        name = self.ident()
        self.expect("(")
        attributes = [self.attribute()]
        while self.peek() == ",":
            self.take()
            attributes.append(self.attribute())
        self.expect(")")

        key: tuple[str, ...] = ()
        entity_key: tuple[str, ...] = ()
        granularity = None
        fks = []
        while self.peek() != ";":
            line = self.line()
            if self.keyword("KEY"):
                self.take()
                key = self.name_list()
            elif self.keyword("ENTITY"):
                self.take()
                self.expect("KEY")
                entity_key = self.name_list()
            elif self.keyword("GRANULARITY"):
                self.take()
                word = self.take()
                try:
                    granularity = Granularity.parse(word)
                except ValueError as exc:
                    raise CatalogSyntaxError(str(exc)).with_line(line) from None
            elif self.keyword("FK"):
                self.take()
                local = self.name_list()
                self.expect("REFERENCES")
                target = self.ident()
                fks.append(ForeignKey(local, target, self.name_list()))
            else:
                found = self.peek()
                raise CatalogSyntaxError(
                    f"expected KEY, ENTITY KEY, GRANULARITY, FK or ';', found {found!r}"
                    if found
                    else "missing ';' at end of statement"
                ).with_line(line)
        self.take()
        temporal = classification is Classification.TEMPORAL
        kwargs = {} if granularity is None else {"granularity": granularity}
        return RelationSchema(
            name=name,
            attributes=tuple(attributes),
            key=key,
            temporal=temporal,
            entity_key=entity_key,
            foreign_keys=tuple(fks),
            classification=classification,
            **kwargs,
        )


def load_catalog(text: str, db: Database | None = None) -> Database:
    db = db if db is not None else Database()
    parser = _CatalogParser(text)
    while parser.peek() is not None:
        line = parser.line()
        schema = parser.statement()
        try:
            db.define_relation(schema)
        except LTRMError as exc:
            raise exc.with_line(line)
    return db


def schema_to_dsl(schema: RelationSchema) -> str:
    prefix = {
        Classification.TEMPORAL: "TEMPORAL ",
        Classification.SEMI_TEMPORAL: "SEMI TEMPORAL ",
        Classification.SNAPSHOT: "",
    }[schema.classification]
    attrs = ",\n".join(
        f"    {a.name} {a.value_type.value}{' NULL' if a.nullable else ''}" for a in schema.attributes
    )
    lines = [f"{prefix}RELATION {schema.name} (", attrs, ")", f"KEY ({', '.join(schema.key)})"]
    if schema.entity_key:
        lines.append(f"ENTITY KEY ({', '.join(schema.entity_key)})")
    lines.append(f"GRANULARITY {schema.granularity.name}")
    for fk in schema.foreign_keys:
        lines.append(
            f"FK ({', '.join(fk.attributes)}) REFERENCES {fk.target} ({', '.join(fk.target_attributes)})"
        )
    return "\n".join(lines) + ";\n"


def catalog_to_dsl(db: Database) -> str:
    return "\n".join(schema_to_dsl(s) for s in db.catalog.values())


# ---------------------------------------------------------------------------
# CSV


def parse_cell(text: str, value_type: ValueType):
    if text == "":
        return None
    if value_type is ValueType.INTEGER:
        try:
            return int(text)
        except ValueError:
            raise TypeMismatch(f"{text!r} is not an integer") from None
    if value_type is ValueType.MONEY:
        return parse_money(text)
    if value_type is ValueType.DATE:
        return parse_timepoint(text, Granularity.DAY)
    return text


def format_cell(value) -> str:
    if value is None:
        return ""
    if value is NOW:
        return format_endpoint(value)
    if isinstance(value, Money):
        return value.literal()
    if hasattr(value, "granularity"):
        return format_timepoint(value)
    return str(value)


def load_csv(db: Database, rel: str, text: str, clock: Clock | None = None) -> int:
    """Append every CSV row of ``text`` to ``rel``; returns the row count."""
    clock = (clock or SystemClock()).pinned()
    schema = db.store(rel).schema
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError(f"{rel}: header row required").with_line(1) from None
    header = [h.strip() for h in header]
    expected = schema.stored_attributes
    if sorted(header) != sorted(expected):
        raise CsvFormatError(
            f"{rel}: header {header} does not match attributes {list(expected)}"
        ).with_line(1)
    count = 0
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise CsvFormatError(f"{rel}: expected {len(header)} fields, found {len(row)}").with_line(line)
        cells = dict(zip(header, (c.strip() for c in row)))
        try:
            values = {a.name: parse_cell(cells[a.name], a.value_type) for a in schema.attributes}
            stamp = None
            if schema.temporal:
                g = schema.granularity
                stamp = ActivationStamp(
                    parse_timepoint(cells[ACTIVATION_START], g),
                    parse_endpoint(cells[ACTIVATION_END], g),
                    parse_timepoint(cells[UPDATETIME], g),
                )
            append_row(db, rel, values, stamp, clock)
        except LTRMError as exc:
            raise exc.with_line(line)
        count += 1
    return count


def relation_to_csv(db: Database, rel: str) -> str:
    schema, tuples = db.lookup(rel)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(schema.stored_attributes)
    for t in tuples:
        writer.writerow([format_cell(v) for v in t.row(schema.stored_attributes)])
    return out.getvalue()


def save_database(db: Database, directory) -> None:
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
        (directory / CATALOG_FILE).write_text(catalog_to_dsl(db), encoding="utf-8")
        for name in db.stores:
            (directory / f"{name}.csv").write_text(relation_to_csv(db, name), encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot save database to {directory}: {exc}") from exc


def load_data_dir(db: Database, directory, clock: Clock | None = None) -> Database:
    """Load ``<Relation>.csv`` for every cataloged relation, in catalog order."""
    directory = Path(directory)
    if not directory.is_dir():
        raise StorageError(f"{directory} is not a directory")
    for name in db.stores:
        path = directory / f"{name}.csv"
        if not path.exists():
            warnings.warn(f"no data file for relation {name}; treating it as empty", stacklevel=2)
            continue
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise StorageError(f"cannot read {path}: {exc}") from exc
        try:
            load_csv(db, name, text, clock)
        except LTRMError as exc:
            exc.args = (f"{path.name}: {exc.args[0]}",) + exc.args[1:]
            raise
    return db


def load_database(directory, clock: Clock | None = None) -> Database:
    directory = Path(directory)
    try:
        text = (directory / CATALOG_FILE).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read catalog in {directory}: {exc}") from exc
    return load_data_dir(load_catalog(text), directory, clock)


def load_fixture(clock: Clock | None = None) -> Database:
    """The employee database used throughout the tests and the README."""
    return load_database(FIXTURE_DIR, clock)
