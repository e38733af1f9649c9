"""Runs a checked query plan against either backend, persisting the result."""

from __future__ import annotations

from ..errors import StorageError
from ..storage.core import (
    KIND_PARTITIONED,
    KIND_RELATIONAL,
    ORIGIN_QUERY,
    StorageHandle,
    TableMeta,
)
from ..storage.mapreduce import MapReduceJob, builtin_group_key_map, run_mapreduce
from .ast import QueryAst
from .parser import parse_query
from .plan import ExecutionPlan, build_plan
from .validate import CheckedQuery, validate


def check_query(query, storage: StorageHandle) -> CheckedQuery:
    ast = parse_query(query) if isinstance(query, str) else query
    if not isinstance(ast, QueryAst):
        raise TypeError(f"expected SQL text or QueryAst, got {type(ast).__name__}")
    if not storage.has_table(ast.source):
        raise StorageError(f"table {ast.source!r} not found in storage {storage.id!r}")
    return validate(ast, storage.table_meta(ast.source))


def plan_query(query, storage: StorageHandle) -> ExecutionPlan:
    return build_plan(check_query(query, storage), storage.kind)


def execute_plan(
    plan: ExecutionPlan, storage: StorageHandle, dest: str, workers: int = 1
) -> TableMeta:
    if plan.backend != storage.kind:
        raise StorageError(
            f"plan built for {plan.backend!r} cannot run on {storage.kind!r} storage"
        )
    if storage.has_table(dest):
        raise StorageError(f"destination table {dest!r} already exists")
    checked = plan.checked

    if plan.backend == KIND_RELATIONAL:
        sql, params = plan.relational.to_sql(checked.ast.source)
        meta = TableMeta(dest, checked.output_columns, 0, ORIGIN_QUERY)
        return storage.create_table_from_select(meta, sql, params)

    if plan.backend == KIND_PARTITIONED:
        mr = plan.mapreduce
        job = MapReduceJob(
            input_table=checked.ast.source,
            output_table=dest,
            output_columns=checked.output_columns,
            map_fn=builtin_group_key_map(mr.key_indices),
            reduce_fn=mr.reduce_fn,
            finalize=mr.finalize,
        )
        return run_mapreduce(job, storage, workers=workers)

    raise StorageError(f"unknown backend kind {plan.backend!r}")


def execute_query(
    query, storage: StorageHandle, dest: str, workers: int = 1
) -> TableMeta:
    """Parse, validate, plan and run in one step; the result lands in ``dest``."""
    plan = plan_query(query, storage)
    return execute_plan(plan, storage, dest, workers=workers)
