"""Parsed query tree for the supported SQL subset.

The grammar covers SELECT [DISTINCT] projections, FROM one table, WHERE
with comparisons joined by AND/OR/NOT, and GROUP BY; COUNT is the only
aggregate.  Predicates use SQL three-valued logic: a comparison against
null is unknown, and only rows where the predicate is true survive.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class ColumnRef:
    name: str


@dataclass(frozen=True)
class CountOf:
    column: ColumnRef


@dataclass(frozen=True)
class ProjItem:
    expr: Union[ColumnRef, CountOf]
    alias: str | None = None

    @property
    def output_name(self) -> str:
        if self.alias is not None:
            return self.alias
        if isinstance(self.expr, CountOf):
            return self.expr.column.name
        return self.expr.name

    @property
    def is_aggregate(self) -> bool:
        return isinstance(self.expr, CountOf)


@dataclass(frozen=True)
class Comparison:
    column: ColumnRef
    op: str  # one of < <= > >= = !=
    literal: Union[int, float, str]


@dataclass(frozen=True)
class BoolOp:
    op: str  # "and" | "or"
    items: tuple


@dataclass(frozen=True)
class NotOp:
    operand: object


Predicate = Union[Comparison, BoolOp, NotOp]


@dataclass(frozen=True)
class QueryAst:
    distinct: bool
    projections: tuple[ProjItem, ...]
    source: str
    predicate: Predicate | None
    group_by: tuple[ColumnRef, ...]


def predicate_truth(pred: Predicate, row: tuple, col_index: dict[str, int]):
    """Three-valued evaluation: True, False or None (unknown)."""
    if isinstance(pred, Comparison):
        value = row[col_index[pred.column.name]]
        if value is None:
            return None
        lit = pred.literal
        if pred.op == "=":
            return value == lit
        if pred.op == "!=":
            return value != lit
        if pred.op == "<":
            return value < lit
        if pred.op == "<=":
            return value <= lit
        if pred.op == ">":
            return value > lit
        return value >= lit
    if isinstance(pred, BoolOp):
        results = [predicate_truth(p, row, col_index) for p in pred.items]
        if pred.op == "and":
            if any(r is False for r in results):
                return False
            if any(r is None for r in results):
                return None
            return True
        if any(r is True for r in results):
            return True
        if any(r is None for r in results):
            return None
        return False
    if isinstance(pred, NotOp):
        r = predicate_truth(pred.operand, row, col_index)
        return None if r is None else not r
    raise TypeError(f"not a predicate node: {pred!r}")


def row_satisfies(pred: Predicate | None, row: tuple, col_index: dict[str, int]) -> bool:
    if pred is None:
        return True
    return predicate_truth(pred, row, col_index) is True
