"""Tokenizer and boolean query language.

Grammar (lowest precedence first)::

    query   := or
    or      := and ("OR" and)*
    and     := unary (["AND"] unary)*      # adjacency is an implicit AND
    unary   := "NOT" unary | "(" or ")" | WORD

Keywords are case-insensitive. A WORD is run through :func:`tokenize`, so
``ohm's`` becomes ``And(Term("ohm"), Term("s"))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

_WORD = re.compile(r"\w+")
_LEXEME = re.compile(r"\(|\)|[^\s()]+")
_KEYWORDS = {"AND", "OR", "NOT"}


class QuerySyntaxError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercase and split on anything that is not a letter, digit or underscore."""
    return _WORD.findall(text.lower())


@dataclass(frozen=True)
class Term:
    term: str


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Not:
    child: "Node"


Node = Union[Term, And, Or, Not]


def positive_terms(node: Node) -> list[str]:
    """Distinct terms not under any NOT, in first-seen order."""
    seen: dict[str, None] = {}

    def visit(n: Node) -> None:
        if isinstance(n, Term):
            seen.setdefault(n.term)
        elif isinstance(n, (And, Or)):
            visit(n.left)
            visit(n.right)
        # terms under Not are deliberately skipped

    visit(node)
    return list(seen)


def all_terms(node: Node) -> list[str]:
    seen: dict[str, None] = {}

    def visit(n: Node) -> None:
        if isinstance(n, Term):
            seen.setdefault(n.term)
        elif isinstance(n, Not):
            visit(n.child)
        else:
            visit(n.left)
            visit(n.right)

    visit(node)
    return list(seen)


def format_query(node: Node) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(node, Term):
        return node.term
    if isinstance(node, Not):
        return f"NOT {format_query(node.child)}"
    op = "AND" if isinstance(node, And) else "OR"
    return f"({format_query(node.left)} {op} {format_query(node.right)})"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.lexemes = _LEXEME.findall(text)
        self.pos = 0

    def peek(self) -> str | None:
        if self.pos < len(self.lexemes):
            return self.lexemes[self.pos]
        return None

    def peek_keyword(self) -> str | None:
        tok = self.peek()
        if tok is not None and tok.upper() in _KEYWORDS:
            return tok.upper()
        return None

    def advance(self) -> str:
        tok = self.lexemes[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Node:
        if not self.lexemes:
            raise QuerySyntaxError("empty query")
        node = self.parse_or()
        if self.peek() is not None:
            tok = self.peek()
            if tok == ")":
                raise QuerySyntaxError("unbalanced parentheses: unexpected ')'")
            raise QuerySyntaxError(f"unexpected {tok!r}")
        return node

    def parse_or(self) -> Node:
        node = self.parse_and()
        while self.peek_keyword() == "OR":
            self.advance()
            node = Or(node, self.parse_and())
        return node

    def parse_and(self) -> Node:
        node = self.parse_unary()
        while True:
            kw = self.peek_keyword()
            if kw == "AND":
                self.advance()
            elif kw == "OR" or self.peek() in (None, ")"):
                return node
            node = And(node, self.parse_unary())

    def parse_unary(self) -> Node:
        tok = self.peek()
        if tok is None:
            raise QuerySyntaxError("dangling operator at end of query")
        kw = self.peek_keyword()
        if kw == "NOT":
            self.advance()
            return Not(self.parse_unary())
        if kw is not None:
            raise QuerySyntaxError(f"dangling operator before {tok!r}")
        if tok == ")":
            raise QuerySyntaxError("unbalanced parentheses or empty group")
        self.advance()
        if tok == "(":
            node = self.parse_or()
            if self.peek() != ")":
                raise QuerySyntaxError("unbalanced parentheses: missing ')'")
            self.advance()
            return node
        words = tokenize(tok)
        if not words:
            raise QuerySyntaxError(f"{tok!r} contains no searchable characters")
        node: Node = Term(words[0])
        for w in words[1:]:
            node = And(node, Term(w))
        return node


def parse_query(text: str) -> Node:
    node = _Parser(text).parse()
    if not positive_terms(node):
        raise QuerySyntaxError("query needs at least one term outside NOT")
    return node
