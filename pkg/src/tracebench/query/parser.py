"""Recursive-descent parser for the SQL subset.

Keywords are case-insensitive; table and column identifiers are
case-sensitive.  Constructs that belong to full SQL but not to the
subset (JOIN, ORDER BY, HAVING, LIMIT, UNION, subqueries, arithmetic in
projections) are rejected with an error naming the construct, distinct
from plain syntax errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..errors import ParseError, UnsupportedConstructError
from .ast import BoolOp, ColumnRef, Comparison, CountOf, NotOp, ProjItem, QueryAst

_KEYWORDS = {
    "select", "distinct", "as", "from", "where", "group", "by",
    "and", "or", "not", "count",
}

_UNSUPPORTED = {
    "join": "JOIN", "inner": "JOIN", "left": "JOIN", "right": "JOIN",
    "full": "JOIN", "cross": "JOIN", "outer": "JOIN",
    "order": "ORDER BY", "having": "HAVING", "limit": "LIMIT",
    "offset": "OFFSET", "union": "UNION", "intersect": "INTERSECT",
    "except": "EXCEPT",
}


@dataclass
class _Tok:
    kind: str  # ident kw num str op end
    text: str
    value: Any
    line: int
    col: int


def _lex(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        start = col
        if c.isdigit() or (c == "." and i + 1 < n and src[i + 1].isdigit()):
            j = i
            seen_dot = seen_exp = False
            while j < n:
                ch = src[j]
                if ch.isdigit():
                    j += 1
                elif ch == "." and not seen_dot and not seen_exp:
                    seen_dot = True
                    j += 1
                elif ch in "eE" and not seen_exp:
                    if j + 1 < n and (src[j + 1].isdigit() or src[j + 1] in "+-"):
                        seen_exp = True
                        j += 2 if src[j + 1] in "+-" else 1
                    else:
                        break
                else:
                    break
            text = src[i:j]
            value = float(text) if (seen_dot or seen_exp) else int(text)
            toks.append(_Tok("num", text, value, line, start))
            col += j - i
            i = j
            continue
        if c == "'":
            j = i + 1
            buf = []
            while j < n:
                if src[j] == "'":
                    if j + 1 < n and src[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    break
                if src[j] == "\n":
                    raise ParseError("unterminated string literal", line, start)
                buf.append(src[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line, start)
            toks.append(_Tok("str", src[i : j + 1], "".join(buf), line, start))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            text = src[i:j]
            kind = "kw" if text.lower() in _KEYWORDS else "ident"
            toks.append(_Tok(kind, text, text, line, start))
            col += j - i
            i = j
            continue
        two = src[i : i + 2]
        if two in ("<=", ">=", "!=", "<>"):
            toks.append(_Tok("op", "!=" if two == "<>" else two, two, line, start))
            i += 2
            col += 2
            continue
        if c in "<>=(),*;-":
            toks.append(_Tok("op", c, c, line, start))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, start)
    toks.append(_Tok("end", "", None, line, col))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at_kw(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text.lower() in words

    def take_kw(self, word: str) -> bool:
        if self.at_kw(word):
            self.next()
            return True
        return False

    def expect_kw(self, word: str) -> None:
        t = self.peek()
        if not self.take_kw(word):
            raise ParseError(f"expected {word.upper()}, found {t.text or 'end of query'!r}", t.line, t.col)

    def at_op(self, *texts: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text in texts

    def check_unsupported(self) -> None:
        t = self.peek()
        if t.kind == "ident" and t.text.lower() in _UNSUPPORTED:
            raise UnsupportedConstructError(_UNSUPPORTED[t.text.lower()], t.line, t.col)

    def ident(self, what: str) -> str:
        self.check_unsupported()
        t = self.peek()
        if t.kind == "ident":
            self.next()
            return t.text
        raise ParseError(f"expected {what}, found {t.text or 'end of query'!r}", t.line, t.col)

    # ------------------------------------------------------------------
    def parse_query(self) -> QueryAst:
        self.expect_kw("select")
        distinct = self.take_kw("distinct")
        projections = [self.parse_projection()]
        while self.at_op(","):
            self.next()
            projections.append(self.parse_projection())
        self.expect_kw("from")
        t = self.peek()
        if self.at_op("("):
            raise UnsupportedConstructError("subquery", t.line, t.col)
        source = self.ident("table name")
        if self.at_op(","):
            t = self.peek()
            raise UnsupportedConstructError("multiple FROM tables", t.line, t.col)
        self.check_unsupported()
        predicate = None
        if self.take_kw("where"):
            predicate = self.parse_predicate()
        self.check_unsupported()
        group_by: list[ColumnRef] = []
        if self.at_kw("group"):
            self.next()
            self.expect_kw("by")
            group_by.append(ColumnRef(self.ident("column name")))
            while self.at_op(","):
                self.next()
                group_by.append(ColumnRef(self.ident("column name")))
        self.check_unsupported()
        t = self.peek()
        if self.at_op(";"):
            self.next()
            t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected trailing input {t.text!r}", t.line, t.col)
        return QueryAst(distinct, tuple(projections), source, predicate, tuple(group_by))

    def parse_projection(self) -> ProjItem:
        t = self.peek()
        if self.at_op("*"):
            raise UnsupportedConstructError("SELECT *", t.line, t.col)
        if self.at_kw("count"):
            self.next()
            tp = self.peek()
            if not self.at_op("("):
                raise ParseError("expected ( after COUNT", tp.line, tp.col)
            self.next()
            inner = ColumnRef(self.ident("column name"))
            tp = self.peek()
            if not self.at_op(")"):
                raise ParseError("expected ) after COUNT argument", tp.line, tp.col)
            self.next()
            expr: ColumnRef | CountOf = CountOf(inner)
        else:
            name = self.ident("column name")
            if self.at_op("("):
                raise UnsupportedConstructError(f"function {name}", t.line, t.col)
            expr = ColumnRef(name)
        alias = None
        if self.take_kw("as"):
            alias = self.ident("alias")
        return ProjItem(expr, alias)

    def parse_predicate(self):
        left = self.parse_and_pred()
        items = [left]
        while self.take_kw("or"):
            items.append(self.parse_and_pred())
        if len(items) == 1:
            return left
        return BoolOp("or", tuple(items))

    def parse_and_pred(self):
        items = [self.parse_not_pred()]
        while self.take_kw("and"):
            items.append(self.parse_not_pred())
        if len(items) == 1:
            return items[0]
        return BoolOp("and", tuple(items))

    def parse_not_pred(self):
        if self.take_kw("not"):
            return NotOp(self.parse_not_pred())
        if self.at_op("("):
            self.next()
            inner = self.parse_predicate()
            t = self.peek()
            if not self.at_op(")"):
                raise ParseError("expected )", t.line, t.col)
            self.next()
            return inner
        return self.parse_comparison()

    def parse_comparison(self):
        t = self.peek()
        if t.kind in ("num", "str"):
            raise ParseError("comparisons must have the form: column <op> literal", t.line, t.col)
        col = ColumnRef(self.ident("column name"))
        t = self.peek()
        if not self.at_op("<", "<=", ">", ">=", "=", "!="):
            raise ParseError(
                f"expected comparison operator, found {t.text or 'end of query'!r}", t.line, t.col
            )
        op = self.next().text
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.next()
            t = self.peek()
            if t.kind != "num":
                raise ParseError("expected a number after '-'", t.line, t.col)
            self.next()
            return Comparison(col, op, -t.value)
        if t.kind == "num" or t.kind == "str":
            self.next()
            return Comparison(col, op, t.value)
        raise ParseError("comparison right-hand side must be a literal", t.line, t.col)


def parse_query(text: str) -> QueryAst:
    """Parse query text into a QueryAst; raises ParseError with position."""
    return _Parser(_lex(text)).parse_query()
