"""Small sandboxed expression dialect.

This is the language used by analysis conditions (``t[[1]]<11000``),
per-element transforms (``x*2``, ``log10(x)``) and user-defined map/reduce
bodies loaded from command files.  It supports numeric and string
literals, arithmetic (``+ - * / % ^``, with ``^`` as power), comparisons,
boolean connectives (``and/or/not`` or ``& | !``), ``t[[k]]`` column
access on the current row, and calls to a fixed whitelist of functions.
Nothing else: no attribute access, no assignment, no host-language
escape.

Null handling follows SQL: comparisons against null are false, null
propagates through arithmetic, and a null condition excludes the row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

from .errors import EvalError, ParseError

# ---------------------------------------------------------------------------
# lexer

_TWO_CHAR = ("<=", ">=", "==", "!=", "[[", "]]", "&&", "||")
_ONE_CHAR = "+-*/%^<>=()[],;!&|"


@dataclass
class _Tok:
    kind: str  # num str ident op end
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
            toks.append(_Tok("op", ";", ";", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        start_col = col
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
                elif ch in "eE" and not seen_exp and j > i:
                    if j + 1 < n and (src[j + 1].isdigit() or src[j + 1] in "+-"):
                        seen_exp = True
                        j += 2 if src[j + 1] in "+-" else 1
                    else:
                        break
                else:
                    break
            text = src[i:j]
            if seen_dot or seen_exp:
                value: Any = float(text)
            else:
                value = int(text)
            toks.append(_Tok("num", text, value, line, start_col))
            col += j - i
            i = j
            continue
        if c in "'\"":
            quote = c
            j = i + 1
            buf = []
            while j < n and src[j] != quote:
                if src[j] == "\n":
                    raise ParseError("unterminated string literal", line, start_col)
                buf.append(src[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line, start_col)
            toks.append(_Tok("str", src[i : j + 1], "".join(buf), line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("ident", src[i:j], src[i:j], line, start_col))
            col += j - i
            i = j
            continue
        two = src[i : i + 2]
        if two in _TWO_CHAR:
            toks.append(_Tok("op", two, two, line, start_col))
            i += 2
            col += 2
            continue
        if c in _ONE_CHAR:
            toks.append(_Tok("op", c, c, line, start_col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line, start_col)
    toks.append(_Tok("end", "", None, line, col))
    return toks


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float | int


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Null:
    pass


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class ColIndex:
    """1-based column access on the current row: t[[k]]."""

    index: int


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple


@dataclass(frozen=True)
class Unary:
    op: str
    operand: Any


@dataclass(frozen=True)
class Binary:
    op: str
    left: Any
    right: Any


Node = Any


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

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.kind == "op" and t.text == text:
            return self.next()
        raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)

    def at_op(self, *texts: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text in texts

    def at_keyword(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text.lower() == word

    # precedence: or < and < not < comparison < add < mul < unary < power < postfix
    def parse_expr(self) -> Node:
        return self.parse_or()

    def parse_or(self) -> Node:
        left = self.parse_and()
        while self.at_op("|", "||") or self.at_keyword("or"):
            self.next()
            left = Binary("or", left, self.parse_and())
        return left

    def parse_and(self) -> Node:
        left = self.parse_not()
        while self.at_op("&", "&&") or self.at_keyword("and"):
            self.next()
            left = Binary("and", left, self.parse_not())
        return left

    def parse_not(self) -> Node:
        if self.at_op("!") or self.at_keyword("not"):
            self.next()
            return Unary("not", self.parse_not())
        return self.parse_comparison()

    def parse_comparison(self) -> Node:
        left = self.parse_add()
        if self.at_op("<", "<=", ">", ">=", "==", "!=", "="):
            op = self.next().text
            if op in ("==", "="):
                op = "=="
            return Binary(op, left, self.parse_add())
        return left

    def parse_add(self) -> Node:
        left = self.parse_mul()
        while self.at_op("+", "-"):
            op = self.next().text
            left = Binary(op, left, self.parse_mul())
        return left

    def parse_mul(self) -> Node:
        left = self.parse_unary()
        while self.at_op("*", "/", "%"):
            op = self.next().text
            left = Binary(op, left, self.parse_unary())
        return left

    def parse_unary(self) -> Node:
        if self.at_op("-"):
            self.next()
            return Unary("neg", self.parse_unary())
        if self.at_op("+"):
            self.next()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_postfix()
        if self.at_op("^"):
            self.next()
            # right associative, binds tighter than unary minus (R convention)
            return Binary("^", base, self.parse_unary())
        return base

    def parse_postfix(self) -> Node:
        node = self.parse_primary()
        while self.at_op("[["):
            tok = self.next()
            idx = self.peek()
            if idx.kind != "num" or not isinstance(idx.value, int):
                raise ParseError("[[ ]] index must be an integer literal", idx.line, idx.col)
            self.next()
            self.expect("]]")
            if not isinstance(node, Name) or node.ident != "t":
                raise ParseError("[[ ]] indexing applies to the row variable t", tok.line, tok.col)
            node = ColIndex(idx.value)
        return node

    def parse_primary(self) -> Node:
        t = self.peek()
        if t.kind == "num":
            self.next()
            return Num(t.value)
        if t.kind == "str":
            self.next()
            return Str(t.value)
        if t.kind == "ident":
            low = t.text.lower()
            if low == "true":
                self.next()
                return Bool(True)
            if low == "false":
                self.next()
                return Bool(False)
            if low in ("null", "na"):
                self.next()
                return Null()
            self.next()
            if self.at_op("("):
                self.next()
                args = []
                if not self.at_op(")"):
                    args.append(self.parse_expr())
                    while self.at_op(","):
                        self.next()
                        args.append(self.parse_expr())
                self.expect(")")
                return Call(t.text, tuple(args))
            return Name(t.text)
        if t.kind == "op" and t.text == "(":
            self.next()
            node = self.parse_expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected token {t.text or 'end of input'!r}", t.line, t.col)


def parse_expression(src: str) -> Node:
    """Parse a single expression; trailing tokens are an error."""
    p = _Parser(_lex(src))
    while p.at_op(";"):
        p.next()
    node = p.parse_expr()
    while p.at_op(";"):
        p.next()
    t = p.peek()
    if t.kind != "end":
        raise ParseError(f"unexpected trailing input {t.text!r}", t.line, t.col)
    return node


def parse_program(src: str) -> list[Node]:
    """Parse a sequence of expressions separated by newlines or semicolons."""
    p = _Parser(_lex(src))
    nodes = []
    while True:
        while p.at_op(";"):
            p.next()
        if p.peek().kind == "end":
            break
        nodes.append(p.parse_expr())
    return nodes


# ---------------------------------------------------------------------------
# evaluation

def _need_number(v: Any, what: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise EvalError(f"{what} expects a number, got {type(v).__name__}")
    return v


def _substr(s: str, start: int, length: int) -> str:
    # 1-based start, like the rest of the dialect
    i = max(int(start) - 1, 0)
    return s[i : i + int(length)]


_FUNCTIONS: dict[str, Callable] = {
    "abs": lambda x: abs(_need_number(x, "abs")),
    "exp": lambda x: math.exp(_need_number(x, "exp")),
    "log": lambda x: math.log(_need_number(x, "log")),
    "log10": lambda x: math.log10(_need_number(x, "log10")),
    "log2": lambda x: math.log2(_need_number(x, "log2")),
    "sqrt": lambda x: math.sqrt(_need_number(x, "sqrt")),
    "floor": lambda x: math.floor(_need_number(x, "floor")),
    "ceil": lambda x: math.ceil(_need_number(x, "ceil")),
    "round": lambda x: round(_need_number(x, "round")),
    "pow": lambda x, y: _need_number(x, "pow") ** _need_number(y, "pow"),
    "min": lambda *xs: min(xs),
    "max": lambda *xs: max(xs),
    "len": lambda s: len(s),
    "upper": lambda s: str(s).upper(),
    "lower": lambda s: str(s).lower(),
    "substr": _substr,
    "concat": lambda *xs: "".join(str(x) for x in xs),
    "str": lambda x: str(x),
    "num": lambda s: float(s),
}


class Evaluator:
    """Evaluates parsed expressions against an environment.

    env maps variable names to values; ``row`` (a sequence) backs the
    t[[k]] accessor.  extra_functions lets callers add context functions
    such as emit/count for map-reduce bodies.
    """

    def __init__(
        self,
        env: dict[str, Any] | None = None,
        row: Sequence | None = None,
        extra_functions: dict[str, Callable] | None = None,
    ):
        self.env = env or {}
        self.row = row
        self.functions = dict(_FUNCTIONS)
        if extra_functions:
            self.functions.update(extra_functions)

    def eval(self, node: Node) -> Any:
        ev = self.eval
        if isinstance(node, Num):
            return node.value
        if isinstance(node, Str):
            return node.value
        if isinstance(node, Bool):
            return node.value
        if isinstance(node, Null):
            return None
        if isinstance(node, Name):
            if node.ident in self.env:
                return self.env[node.ident]
            if node.ident == "row":
                if self.row is None:
                    raise EvalError("no current row in this context")
                return tuple(self.row)
            raise EvalError(f"unknown name {node.ident!r}")
        if isinstance(node, ColIndex):
            if self.row is None:
                raise EvalError("t[[k]] used outside a row context")
            if not 1 <= node.index <= len(self.row):
                raise EvalError(
                    f"column index {node.index} out of range (row has {len(self.row)} columns)"
                )
            return self.row[node.index - 1]
        if isinstance(node, Unary):
            if node.op == "not":
                return not _truthy(ev(node.operand))
            v = ev(node.operand)
            if v is None:
                return None
            return -_need_number(v, "unary minus")
        if isinstance(node, Binary):
            if node.op == "and":
                return _truthy(ev(node.left)) and _truthy(ev(node.right))
            if node.op == "or":
                return _truthy(ev(node.left)) or _truthy(ev(node.right))
            left = ev(node.left)
            right = ev(node.right)
            return _binop(node.op, left, right)
        if isinstance(node, Call):
            fn = self.functions.get(node.fn)
            if fn is None:
                raise EvalError(f"unknown function {node.fn!r}")
            args = [ev(a) for a in node.args]
            try:
                return fn(*args)
            except EvalError:
                raise
            except TypeError as exc:
                raise EvalError(f"bad arguments to {node.fn}: {exc}") from None
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise EvalError(f"{node.fn} failed: {exc}") from None
        raise EvalError(f"cannot evaluate node {node!r}")


def _truthy(v: Any) -> bool:
    if v is None:
        return False
    if isinstance(v, bool):
        return v
    raise EvalError(f"condition must be boolean, got {type(v).__name__}")


def _binop(op: str, left: Any, right: Any) -> Any:
    if op in ("==", "!=", "<", "<=", ">", ">="):
        if left is None or right is None:
            return False
        ln = isinstance(left, (int, float)) and not isinstance(left, bool)
        rn = isinstance(right, (int, float)) and not isinstance(right, bool)
        if ln != rn:
            raise EvalError(f"cannot compare {type(left).__name__} with {type(right).__name__}")
        if op == "==":
            return left == right
        if op == "!=":
            return left != right
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    if left is None or right is None:
        return None
    if op == "+" and isinstance(left, str) and isinstance(right, str):
        return left + right
    l = _need_number(left, f"operator {op}")
    r = _need_number(right, f"operator {op}")
    if op == "+":
        return l + r
    if op == "-":
        return l - r
    if op == "*":
        return l * r
    if op == "/":
        if r == 0:
            raise EvalError("division by zero")
        return l / r
    if op == "%":
        if r == 0:
            raise EvalError("modulo by zero")
        return l % r
    if op == "^":
        return l**r
    raise EvalError(f"unknown operator {op!r}")


def predicate_from_node(node: Node):
    """Row condition from an already-parsed expression."""

    def test(row: Sequence) -> bool:
        v = Evaluator(row=row).eval(node)
        return _truthy(v)

    return test


def unary_from_node(node: Node):
    """Element transform from an already-parsed expression; binds ``x``."""

    def apply(x: Any) -> Any:
        return Evaluator(env={"x": x}).eval(node)

    return apply


def compile_predicate(src: str):
    """Parse a row condition once; returns row -> bool (null-safe)."""
    return predicate_from_node(parse_expression(src))


def compile_unary(src: str):
    """Parse an element transform once; the element is bound to ``x``."""
    return unary_from_node(parse_expression(src))
