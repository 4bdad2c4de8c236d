"""TQL: a small SQL-like temporal query language."""

from .ast import AsOf, Comparison, DateTimeLiteral, During, History, Join, Query
from .evaluator import evaluate, resolve_time_literal
from .lexer import Token, TokenKind, tokenize
from .parser import Parser, parse
from .render import FORMATS, ResultTable, print_ast, render_result

__all__ = [
    "AsOf",
    "Comparison",
    "DateTimeLiteral",
    "During",
    "FORMATS",
    "History",
    "Join",
    "Parser",
    "Query",
    "ResultTable",
    "Token",
    "TokenKind",
    "evaluate",
    "parse",
    "print_ast",
    "render_result",
    "resolve_time_literal",
    "tokenize",
]
