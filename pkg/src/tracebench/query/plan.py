"""Backend-specific execution plans built from a checked query.

A visitor walks the predicate tree once per backend: the relational
builder emits parameterized SQL, the partitioned builder compiles a
row predicate for the reduce phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from ..errors import TracebenchError
from ..storage.core import KIND_PARTITIONED, KIND_RELATIONAL
from .ast import BoolOp, Comparison, NotOp, row_satisfies
from .validate import CheckedQuery


class PredicateVisitor:
    """Dispatch base for predicate-tree walkers."""

    def visit(self, node):
        if isinstance(node, Comparison):
            return self.visit_comparison(node)
        if isinstance(node, BoolOp):
            return self.visit_bool_op(node)
        if isinstance(node, NotOp):
            return self.visit_not(node)
        raise TracebenchError(f"no visitor for node {type(node).__name__}")

    def visit_comparison(self, node: Comparison):  # pragma: no cover - abstract
        raise NotImplementedError

    def visit_bool_op(self, node: BoolOp):  # pragma: no cover - abstract
        raise NotImplementedError

    def visit_not(self, node: NotOp):  # pragma: no cover - abstract
        raise NotImplementedError


def quote_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


class SqlPredicateVisitor(PredicateVisitor):
    """Renders a predicate as a parameterized SQL fragment."""

    def __init__(self, table: str):
        self.table = table
        self.params: list[Any] = []

    def _col(self, name: str) -> str:
        # qualify with the source table so projection aliases can never shadow
        return f"{quote_ident(self.table)}.{quote_ident(name)}"

    def visit_comparison(self, node: Comparison) -> str:
        self.params.append(node.literal)
        return f"{self._col(node.column.name)} {node.op} ?"

    def visit_bool_op(self, node: BoolOp) -> str:
        joiner = " AND " if node.op == "and" else " OR "
        return "(" + joiner.join(self.visit(p) for p in node.items) + ")"

    def visit_not(self, node: NotOp) -> str:
        return f"(NOT {self.visit(node.operand)})"


# --- relational plan: an ordered list of stages --------------------------


@dataclass(frozen=True)
class FilterStage:
    sql: str
    params: tuple[Any, ...]


@dataclass(frozen=True)
class GroupCountStage:
    group_sql: str


@dataclass(frozen=True)
class ProjectStage:
    select_list: str


@dataclass(frozen=True)
class DistinctStage:
    pass


@dataclass(frozen=True)
class RelationalPlan:
    stages: tuple[Any, ...]

    def to_sql(self, source: str) -> tuple[str, tuple[Any, ...]]:
        select_list = "*"
        where = ""
        group = ""
        distinct = ""
        params: tuple[Any, ...] = ()
        for stage in self.stages:
            if isinstance(stage, FilterStage):
                where = f" WHERE {stage.sql}"
                params = stage.params
            elif isinstance(stage, GroupCountStage):
                group = f" GROUP BY {stage.group_sql}"
            elif isinstance(stage, ProjectStage):
                select_list = stage.select_list
            elif isinstance(stage, DistinctStage):
                distinct = "DISTINCT "
        sql = f"SELECT {distinct}{select_list} FROM {quote_ident(source)}{where}{group}"
        return sql, params


# --- partitioned plan: a map-reduce shape --------------------------------


@dataclass(frozen=True)
class MapReducePlan:
    # source-row indices forming the shuffle key; empty tuple = single group
    key_indices: tuple[int, ...]
    reduce_fn: Callable[[tuple, list], list]
    # applied once to the gathered rows (global DISTINCT after a group-by)
    finalize: Callable[[list], list] | None = None


@dataclass(frozen=True)
class ExecutionPlan:
    backend: str
    checked: CheckedQuery
    relational: RelationalPlan | None = None
    mapreduce: MapReducePlan | None = None


def _build_relational(checked: CheckedQuery) -> RelationalPlan:
    ast = checked.ast
    src = ast.source
    stages: list[Any] = []

    if ast.predicate is not None:
        visitor = SqlPredicateVisitor(src)
        sql = visitor.visit(ast.predicate)
        stages.append(FilterStage(sql, tuple(visitor.params)))

    qualify = lambda name: f"{quote_ident(src)}.{quote_ident(name)}"
    if ast.group_by:
        stages.append(GroupCountStage(", ".join(qualify(g.name) for g in ast.group_by)))

    parts = []
    for item, (kind, idx) in zip(ast.projections, checked.proj_specs):
        source_col = qualify(checked.source.columns[idx].name)
        expr = f"COUNT({source_col})" if kind == "count" else source_col
        parts.append(f"{expr} AS {quote_ident(item.output_name)}")
    stages.append(ProjectStage(", ".join(parts)))

    if ast.distinct:
        stages.append(DistinctStage())

    return RelationalPlan(tuple(stages))


def _build_mapreduce(checked: CheckedQuery) -> MapReducePlan:
    ast = checked.ast
    col_index = checked.col_index
    predicate = ast.predicate
    proj_specs = checked.proj_specs
    group_indices = checked.group_indices
    key_pos = {src_idx: k for k, src_idx in enumerate(group_indices)}
    distinct = ast.distinct

    def reduce_fn(key: tuple, records: list) -> list:
        if predicate is None:
            survivors = records
        else:
            survivors = [r for r in records if row_satisfies(predicate, r, col_index)]
        if group_indices:
            if not survivors:
                return []  # groups emptied by the filter are elided
            row = []
            for kind, idx in proj_specs:
                if kind == "count":
                    row.append(sum(1 for r in survivors if r[idx] is not None))
                else:
                    row.append(key[key_pos[idx]])
            return [tuple(row)]
        out = [tuple(r[idx] for _, idx in proj_specs) for r in survivors]
        if distinct:
            out = list(dict.fromkeys(out))
        return out

    finalize = None
    projected = {idx for kind, idx in proj_specs if kind == "col"}
    if distinct and group_indices and not set(group_indices) <= projected:
        # per-key rows are no longer unique once a grouped column is dropped
        def finalize(rows: list) -> list:
            return list(dict.fromkeys(rows))

    return MapReducePlan(group_indices, reduce_fn, finalize)


def build_plan(checked: CheckedQuery, backend: str) -> ExecutionPlan:
    if backend == KIND_RELATIONAL:
        return ExecutionPlan(backend, checked, relational=_build_relational(checked))
    if backend == KIND_PARTITIONED:
        return ExecutionPlan(backend, checked, mapreduce=_build_mapreduce(checked))
    raise TracebenchError(f"unknown backend kind {backend!r}")
