"""Exception hierarchy shared by every layer of the engine."""

from __future__ import annotations


class LTRMError(Exception):
    """Base class for all engine errors.

    ``line`` is filled in by loaders (catalog and CSV) so that errors raised
    deep inside schema validation still point at the offending input line.
    """

    line: int | None = None

    def with_line(self, line: int) -> "LTRMError":
        self.line = line
        self.args = (f"line {line}: {self.args[0] if self.args else ''}",) + self.args[1:]
        return self


# time model
class InvalidDate(LTRMError):
    pass


class GranularityMismatch(LTRMError):
    pass


class InvalidInterval(LTRMError):
    pass


# schema / catalog
class SchemaError(LTRMError):
    pass


class DuplicateRelation(SchemaError):
    pass


class KeyMissingActivationStart(SchemaError):
    pass


class EmptyEntityKey(SchemaError):
    pass


class UnknownForeignTarget(SchemaError):
    pass


class ReservedAttributeName(SchemaError):
    pass


class UnknownRelation(LTRMError):
    pass


class UnknownAttribute(LTRMError):
    pass


class TypeMismatch(LTRMError):
    pass


class NotTemporal(LTRMError):
    pass


# modification semantics
class NoOpenTuple(LTRMError):
    pass


class EffectiveBeforeStart(LTRMError):
    pass


class ConstraintViolation(LTRMError):
    """Raised when a mutation would break an integrity rule.

    ``violations`` holds the :class:`ltrm.constraints.Violation` records that
    caused the rejection; ``kind`` is the kind of the first one.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        self.kind = self.violations[0].kind if self.violations else None
        detail = "; ".join(v.describe() for v in self.violations)
        super().__init__(f"constraint violation: {detail}")


# query language
class LexError(LTRMError):
    def __init__(self, message: str, position: int, snippet: str = ""):
        self.position = position
        self.snippet = snippet
        super().__init__(f"{message} at position {position}: {snippet!r}")


class ParseError(LTRMError):
    def __init__(self, message: str, position: int, expected=()):
        self.position = position
        self.expected = tuple(expected)
        suffix = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at position {position}{suffix}")


class TemporalClauseOnSnapshotRelation(LTRMError):
    pass


class UnsupportedQuery(LTRMError):
    pass


# storage
class CatalogSyntaxError(LTRMError):
    pass


class CsvFormatError(LTRMError):
    pass


class StorageError(LTRMError):
    """Filesystem failure while saving or loading a database directory."""
