"""Command-line entry point: batch execution and an interactive REPL."""

from __future__ import annotations

import argparse
import os
import sys
import warnings
from dataclasses import dataclass, field

from . import engine, storage
from .chronos import NOW, Clock, FrozenClock, Granularity, SystemClock, make_timepoint, natural_granularity, parse_time_fields
from .constraints import validate_database
from .errors import LTRMError, ParseError
from .model import Database, RelationSchema
from .tql import FORMATS, evaluate, render_result
from .tql.ast import DateTimeLiteral
from .tql.lexer import TokenKind
from .tql.parser import Parser

BANNER = "ltrm: temporal relational engine. Type .help for commands, .quit to leave."
PROMPT = "ltrm> "

HELP = """\
.relations                         list relations
.schema <rel>                      show a relation declaration
.check                             validate every constraint
.insert <rel> (<v>, ...) [START <t> [END <t>] [UPDATE <t>]]
.change <rel> SET a=<v>, ... WHERE k=<v>, ... EFFECTIVE <t> [UPDATE <t>]
.delete <rel> WHERE k=<v>, ... EFFECTIVE <t>
.save <dir>                        write catalog and CSV files
.quit                              leave
Any other line is a query, e.g. SELECT * FROM Salary WHERE empno = 103 HISTORY"""


class Quit(Exception):
    pass


@dataclass
class Session:
    db: Database = field(default_factory=Database)
    clock: Clock = field(default_factory=SystemClock)
    format: str = "table"

    def execute(self, line: str) -> str:
        """Run one command or query; errors propagate."""
        line = line.strip()
        if not line:
            return ""
        if line.startswith("."):
            return self._command(line)
        return render_result(evaluate(line, self.db, self.clock), self.format)

    def _command(self, line: str) -> str:
        name, _, rest = line.partition(" ")
        rest = rest.strip()
        name = name.lower()
        if name in (".quit", ".exit"):
            raise Quit()
        if name == ".help":
            return HELP + "\n"
        if name == ".relations":
            return "".join(
                f"{s.name}  {s.classification.value}  {len(self.db.stores[s.name])} tuples\n"
                for s in self.db.catalog.values()
            )
        if name == ".schema":
            return storage.schema_to_dsl(self.db.store(self.db.resolve_name(rest)).schema)
        if name == ".check":
            return validate_database(self.db, self.clock).text() + "\n"
        if name == ".save":
            if not rest:
                raise LTRMError(".save needs a directory")
            storage.save_database(self.db, rest)
            return f"saved {len(self.db.stores)} relations to {rest}\n"
        if name in (".insert", ".change", ".delete"):
            return _Mutation(self, rest).run(name[1:])
        raise LTRMError(f"unknown command {name}; try .help")


class _Mutation(Parser):
    """Parses the arguments of .insert/.change/.delete with the query lexer."""

    def __init__(self, session: Session, text: str):
        super().__init__(text)
        self.session = session

    def word(self, *words: str) -> bool:
        return self.at(TokenKind.IDENT) and self.current.value.upper() in words

    def expect_word(self, word: str) -> None:
        if not self.word(word):
            self.fail(f"expected {word}", TokenKind.IDENT)
        self.advance()

    def value(self):
        if self.word("NULL"):
            self.advance()
            return None
        return self.match_literal()

    def assignments(self, *stop: str) -> dict:
        out = {}
        while True:
            name = self.ident("expected attribute name")
            self.expect(TokenKind.EQ)
            out[name] = self.value()
            if self.at(TokenKind.COMMA, TokenKind.KW_AND):
                self.advance()
                continue
            return out

    def point(self, schema: RelationSchema, open_end: bool = False):
        lit = self.match_time_literal()
        if lit is NOW:
            return NOW if open_end else self.session.clock.now_at(schema.granularity)
        return make_timepoint(granularity=schema.granularity, **lit.fields())

    def finish(self) -> None:
        if not self.at(TokenKind.EOF):
            self.fail("unexpected trailing input", TokenKind.EOF)

    def run(self, verb: str) -> str:
        db, clock = self.session.db, self.session.clock
        rel = db.resolve_name(self.ident("expected relation name"))
        schema = db.store(rel).schema
        if verb == "insert":
            self.expect(TokenKind.LPAREN)
            values = [self.value()]
            while self.at(TokenKind.COMMA):
                self.advance()
                values.append(self.value())
            self.expect(TokenKind.RPAREN)
            names = schema.attribute_names
            if len(values) != len(names):
                raise LTRMError(f"{rel} takes {len(names)} values ({', '.join(names)}), got {len(values)}")
            row = dict(zip(names, values))
            if not schema.temporal:
                self.finish()
                tid = engine.append_row(db, rel, row, clock=clock)
                return f"inserted tuple {tid}\n"
            self.expect_word("START")
            start = self.point(schema)
            end, update = NOW, None
            if self.word("END"):
                self.advance()
                end = self.point(schema, open_end=True)
            if self.word("UPDATE"):
                self.advance()
                update = self.point(schema)
            self.finish()
            tid = engine.insert(db, rel, row, start, end, update, clock)
            return f"inserted tuple {tid}\n"

        if verb == "change":
            self.expect_word("SET")
            updates = self.assignments()
        self.expect(TokenKind.KW_WHERE)
        entity = self.assignments()
        self.expect_word("EFFECTIVE")
        effective = self.point(schema)
        if verb == "change":
            update = None
            if self.word("UPDATE"):
                self.advance()
                update = self.point(schema)
            self.finish()
            tid = engine.change(db, rel, entity, updates, effective, update, clock)
            return f"changed: tuple {tid} appended\n"
        self.finish()
        engine.logical_delete(db, rel, entity, effective, clock)
        return "deleted: activation closed\n"


def repl_command(line: str, session: Session) -> str:
    """Output text for one REPL line; errors are rendered, never raised."""
    try:
        return session.execute(line)
    except LTRMError as exc:
        return f"error: {exc}\n"


def repl(session: Session, stdin=None, stdout=None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    stdout.write(BANNER + "\n")
    while True:
        stdout.write(PROMPT)
        stdout.flush()
        line = stdin.readline()
        if not line:
            stdout.write("\n")
            return 0
        try:
            stdout.write(repl_command(line, session))
        except Quit:
            return 0


def parse_now(text: str) -> FrozenClock:
    fields = parse_time_fields(text)
    return FrozenClock.at(make_timepoint(granularity=natural_granularity(fields), **fields))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ltrm", description="Temporal relational engine with the TQL query language.")
    p.add_argument("--catalog", metavar="FILE", help="catalog file with relation declarations")
    p.add_argument("--data", metavar="DIR", help="directory of <Relation>.csv files")
    p.add_argument("--now", metavar="DD-MM-YYYY[ HH:MM]", help="freeze the clock at this time")
    p.add_argument("--execute", "-e", metavar="TEXT", help="run one query or dot-command and exit")
    p.add_argument(
        "--format",
        choices=FORMATS,
        default=os.environ.get("LTRM_FORMAT", "table"),
        help="result format (default: $LTRM_FORMAT or table)",
    )
    return p


def run(argv=None, stdin=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format not in FORMATS:
        parser.error(f"unknown format {args.format!r}")

    clock: Clock = SystemClock()
    if args.now:
        try:
            clock = parse_now(args.now)
        except LTRMError as exc:
            print(f"error: --now: {exc}", file=stderr)
            return 1

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if args.catalog:
                with open(args.catalog, encoding="utf-8") as fh:
                    db = storage.load_catalog(fh.read())
                if args.data:
                    storage.load_data_dir(db, args.data, clock)
            elif args.data:
                db = storage.load_database(args.data, clock)
            else:
                db = Database()
        for w in caught:
            print(f"warning: {w.message}", file=stderr)
    except (LTRMError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1

    session = Session(db, clock, args.format)
    if args.execute is not None:
        try:
            stdout.write(session.execute(args.execute))
        except Quit:
            pass
        except LTRMError as exc:
            print(f"error: {exc}", file=stderr)
            return 2
        return 0
    return repl(session, stdin, stdout)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
