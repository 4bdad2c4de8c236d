from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Any

from ..chronos import Granularity, make_timepoint
from ..errors import InvalidDate, LexError
from ..model import Money

KEYWORDS = (
    "SELECT", "FROM", "JOIN", "ON", "WHERE", "AND",
    "AS", "OF", "DURING", "HISTORY", "COALESCED", "CURRENT",
)


class TokenKind(enum.Enum):
    IDENT = "identifier"
    INT = "integer"
    STRING = "string"
    MONEY = "money"
    DATE = "date"
    TIME = "time"
    STAR = "*"
    COMMA = ","
    EQ = "="
    NE = "<>"
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="
    LBRACKET = "["
    RBRACKET = "]"
    LPAREN = "("
    RPAREN = ")"
    EOF = "end of input"
    KW_SELECT = "SELECT"
    KW_FROM = "FROM"
    KW_JOIN = "JOIN"
    KW_ON = "ON"
    KW_WHERE = "WHERE"
    KW_AND = "AND"
    KW_AS = "AS"
    KW_OF = "OF"
    KW_DURING = "DURING"
    KW_HISTORY = "HISTORY"
    KW_COALESCED = "COALESCED"
    KW_CURRENT = "CURRENT"


COMPARISON_KINDS = {
    TokenKind.EQ: "=",
    TokenKind.NE: "<>",
    TokenKind.LT: "<",
    TokenKind.LE: "<=",
    TokenKind.GT: ">",
    TokenKind.GE: ">=",
}


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    value: Any
    pos: int

    def __repr__(self) -> str:
        if self.value is None:
            return self.kind.name
        return f"{self.kind.name}({self.value!r})"


_PUNCT = [
    ("<=", TokenKind.LE),
    (">=", TokenKind.GE),
    ("<>", TokenKind.NE),
    ("=", TokenKind.EQ),
    ("<", TokenKind.LT),
    (">", TokenKind.GT),
    ("*", TokenKind.STAR),
    (",", TokenKind.COMMA),
    ("[", TokenKind.LBRACKET),
    ("]", TokenKind.RBRACKET),
    ("(", TokenKind.LPAREN),
    (")", TokenKind.RPAREN),
]

_WS = re.compile(r"\s+")
_DATE = re.compile(r"\d+-\d+-\d+")
_TIME = re.compile(r"\d+:\d+")
_MONEY = re.compile(r"([Rr][Ss])\.\s?(-?\d+)")
_INT = re.compile(r"-?\d+")
_STRING = re.compile(r"'((?:[^']|'')*)'")
_WORD = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _snippet(text: str, pos: int) -> str:
    return text[pos : pos + 12]


def tokenize(text: str) -> list[Token]:
    """Split query text into tokens; the list always ends with an EOF token."""
    tokens: list[Token] = []
    pos, n = 0, len(text)
    while pos < n:
        m = _WS.match(text, pos)
        if m:
            pos = m.end()
            continue
        if m := _DATE.match(text, pos):
            raw = m.group(0)
            parts = raw.split("-")
            if [len(p) for p in parts] != [2, 2, 4]:
                raise LexError("date literal must be DD-MM-YYYY", pos, raw)
            day, month, year = map(int, parts)
            try:
                value = make_timepoint(year, month, day, granularity=Granularity.DAY)
            except InvalidDate:
                raise LexError("invalid date", pos, raw) from None
            tokens.append(Token(TokenKind.DATE, value, pos))
            pos = m.end()
            continue
        if m := _TIME.match(text, pos):
            raw = m.group(0)
            hour, minute = raw.split(":")
            if len(hour) != 2 or len(minute) != 2 or int(hour) > 23 or int(minute) > 59:
                raise LexError("invalid time of day", pos, raw)
            tokens.append(Token(TokenKind.TIME, (int(hour), int(minute)), pos))
            pos = m.end()
            continue
        if m := _MONEY.match(text, pos):
            tokens.append(Token(TokenKind.MONEY, Money(int(m.group(2)), "Rs"), pos))
            pos = m.end()
            continue
        if m := _INT.match(text, pos):
            if _WORD.match(text, m.end()):
                raise LexError("malformed number", pos, _snippet(text, pos))
            tokens.append(Token(TokenKind.INT, int(m.group(0)), pos))
            pos = m.end()
            continue
        if text[pos] == "'":
            m = _STRING.match(text, pos)
            if not m:
                raise LexError("unterminated string", pos, _snippet(text, pos))
            tokens.append(Token(TokenKind.STRING, m.group(1).replace("''", "'"), pos))
            pos = m.end()
            continue
        if m := _WORD.match(text, pos):
            word = m.group(0)
            if word.upper() in KEYWORDS:
                tokens.append(Token(TokenKind["KW_" + word.upper()], None, pos))
            else:
                tokens.append(Token(TokenKind.IDENT, word, pos))
            pos = m.end()
            continue
        for symbol, kind in _PUNCT:
            if text.startswith(symbol, pos):
                tokens.append(Token(kind, None, pos))
                pos += len(symbol)
                break
        else:
            raise LexError("unexpected character", pos, _snippet(text, pos))
    tokens.append(Token(TokenKind.EOF, None, n))
    return tokens
