"""Recursive-descent parser for TQL.

Grammar::

    query   := SELECT proj FROM ident [join] [WHERE pred] [tclause]
    proj    := "*" | ident {"," ident}
    join    := JOIN ident ON ident "=" ident
    pred    := cmp {AND cmp}
    cmp     := ident op literal
    tclause := AS OF tlit | DURING "[" tlit "," tlit "]" | HISTORY [COALESCED]
    tlit    := DATE [TIME] | CURRENT
    literal := INT | STRING | MONEY | DATE
"""

from __future__ import annotations

from ..chronos import NOW
from ..errors import ParseError
from .ast import AsOf, Comparison, DateTimeLiteral, During, History, Join, Query
from .lexer import COMPARISON_KINDS, Token, TokenKind, tokenize

LITERAL_KINDS = (TokenKind.INT, TokenKind.STRING, TokenKind.MONEY, TokenKind.DATE)


def _describe(kinds) -> list[str]:
    return [k.value for k in kinds]


class Parser:
    """Cursor over a token list.  Each ``match_*`` method consumes one construct."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def at(self, *kinds: TokenKind) -> bool:
        return self.current.kind in kinds

    def advance(self) -> Token:
        token = self.current
        if token.kind is not TokenKind.EOF:
            self.index += 1
        return token

    def fail(self, what: str, *kinds: TokenKind):
        token = self.current
        found = "end of input" if token.kind is TokenKind.EOF else self.text[token.pos :].split()[0]
        raise ParseError(f"{what}, found {found!r}", token.pos, _describe(kinds))

    def expect(self, kind: TokenKind, what: str | None = None) -> Token:
        if not self.at(kind):
            self.fail(what or f"expected {kind.value}", kind)
        return self.advance()

    def ident(self, what: str = "expected identifier") -> str:
        return self.expect(TokenKind.IDENT, what).value

    def parse_query(self) -> Query:
        query = self.match_query()
        if not self.at(TokenKind.EOF):
            expected = []
            if query.temporal is None:
                if query.predicate:
                    expected.append(TokenKind.KW_AND)
                else:
                    if query.join is None:
                        expected.append(TokenKind.KW_JOIN)
                    expected.append(TokenKind.KW_WHERE)
                expected += [TokenKind.KW_AS, TokenKind.KW_DURING, TokenKind.KW_HISTORY]
            expected.append(TokenKind.EOF)
            self.fail("unexpected trailing input", *expected)
        return query

    def match_query(self) -> Query:
        self.expect(TokenKind.KW_SELECT, "query must start with SELECT")
        projection = self.match_projection()
        self.expect(TokenKind.KW_FROM, "expected FROM after the projection")
        source = self.ident("expected relation name after FROM")
        join = None
        if self.at(TokenKind.KW_JOIN):
            join = self.match_join()
        predicate: tuple[Comparison, ...] = ()
        if self.at(TokenKind.KW_WHERE):
            self.advance()
            predicate = self.match_predicate()
        temporal = None
        if self.at(TokenKind.KW_AS, TokenKind.KW_DURING, TokenKind.KW_HISTORY):
            temporal = self.match_temporal_clause()
        return Query(projection, source, join, predicate, temporal)

    def match_projection(self) -> tuple[str, ...] | None:
        if self.at(TokenKind.STAR):
            self.advance()
            return None
        if not self.at(TokenKind.IDENT):
            self.fail("projection expected", TokenKind.STAR, TokenKind.IDENT)
        names = [self.advance().value]
        while self.at(TokenKind.COMMA):
            self.advance()
            names.append(self.ident())
        return tuple(names)

    def match_join(self) -> Join:
        self.expect(TokenKind.KW_JOIN)
        relation = self.ident("expected relation name after JOIN")
        self.expect(TokenKind.KW_ON)
        left = self.ident()
        self.expect(TokenKind.EQ, "JOIN supports only an equality condition")
        right = self.ident()
        return Join(relation, left, right)

    def match_predicate(self) -> tuple[Comparison, ...]:
        comparisons = [self.match_comparison()]
        while self.at(TokenKind.KW_AND):
            self.advance()
            comparisons.append(self.match_comparison())
        return tuple(comparisons)

    def match_comparison(self) -> Comparison:
        attribute = self.ident("expected attribute name in predicate")
        if self.current.kind not in COMPARISON_KINDS:
            self.fail("expected comparison operator", *COMPARISON_KINDS)
        op = COMPARISON_KINDS[self.advance().kind]
        return Comparison(attribute, op, self.match_literal())

    def match_literal(self):
        if not self.at(*LITERAL_KINDS):
            self.fail("expected literal", *LITERAL_KINDS)
        return self.advance().value

    def match_temporal_clause(self):
        if self.at(TokenKind.KW_AS):
            self.advance()
            self.expect(TokenKind.KW_OF)
            return AsOf(self.match_time_literal())
        if self.at(TokenKind.KW_DURING):
            self.advance()
            self.expect(TokenKind.LBRACKET)
            start = self.match_time_literal()
            self.expect(TokenKind.COMMA)
            end = self.match_time_literal()
            self.expect(TokenKind.RBRACKET)
            return During(start, end)
        self.expect(TokenKind.KW_HISTORY)
        if self.at(TokenKind.KW_COALESCED):
            self.advance()
            return History(coalesced=True)
        return History()

    def match_time_literal(self):
        if self.at(TokenKind.KW_CURRENT):
            self.advance()
            return NOW
        if not self.at(TokenKind.DATE):
            self.fail("expected time literal", TokenKind.DATE, TokenKind.KW_CURRENT)
        year, month, day, *_ = self.advance().value.fields()
        if self.at(TokenKind.TIME):
            hour, minute = self.advance().value
            return DateTimeLiteral(year, month, day, hour, minute)
        return DateTimeLiteral(year, month, day)


def parse(text: str) -> Query:
    return Parser(text).parse_query()
