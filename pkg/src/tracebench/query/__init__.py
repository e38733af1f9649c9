from .ast import (
    BoolOp,
    ColumnRef,
    Comparison,
    CountOf,
    NotOp,
    ProjItem,
    QueryAst,
    predicate_truth,
    row_satisfies,
)
from .execute import check_query, execute_plan, execute_query, plan_query
from .parser import parse_query
from .plan import ExecutionPlan, build_plan
from .validate import CheckedQuery, validate

__all__ = [
    "BoolOp",
    "CheckedQuery",
    "ColumnRef",
    "Comparison",
    "CountOf",
    "ExecutionPlan",
    "NotOp",
    "ProjItem",
    "QueryAst",
    "build_plan",
    "check_query",
    "execute_plan",
    "execute_query",
    "parse_query",
    "plan_query",
    "predicate_truth",
    "row_satisfies",
    "validate",
]
