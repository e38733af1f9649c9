"""Schema validation: resolves column references and checks literal types."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import SchemaError
from ..storage.core import FLOAT64, INT64, TEXT, ColumnMeta, TableMeta
from .ast import BoolOp, Comparison, CountOf, NotOp, QueryAst


@dataclass(frozen=True)
class CheckedQuery:
    """A validated query with source indices and output schema resolved."""

    ast: QueryAst
    source: TableMeta
    output_columns: tuple[ColumnMeta, ...]
    col_index: dict[str, int]
    group_indices: tuple[int, ...]
    # one spec per projection: ("col", source_index) or ("count", source_index)
    proj_specs: tuple[tuple[str, int], ...]


def _literal_compatible(dtype: str, literal) -> bool:
    if dtype == TEXT:
        return isinstance(literal, str)
    return isinstance(literal, (int, float)) and not isinstance(literal, bool)


def _walk_comparisons(pred):
    if isinstance(pred, Comparison):
        yield pred
    elif isinstance(pred, BoolOp):
        for p in pred.items:
            yield from _walk_comparisons(p)
    elif isinstance(pred, NotOp):
        yield from _walk_comparisons(pred.operand)


def validate(ast: QueryAst, schema: TableMeta) -> CheckedQuery:
    col_index = {c.name: i for i, c in enumerate(schema.columns)}

    def resolve(name: str) -> int:
        if name not in col_index:
            raise SchemaError(
                f"unknown column {name!r} in table {schema.name!r}"
                f" (columns: {', '.join(col_index)})"
            )
        return col_index[name]

    group_indices = tuple(resolve(g.name) for g in ast.group_by)
    grouped_names = {g.name for g in ast.group_by}

    proj_specs = []
    out_cols = []
    for item in ast.projections:
        if isinstance(item.expr, CountOf):
            if not ast.group_by:
                raise SchemaError("COUNT requires a GROUP BY clause")
            idx = resolve(item.expr.column.name)
            proj_specs.append(("count", idx))
            out_cols.append(ColumnMeta(item.output_name, INT64))
        else:
            idx = resolve(item.expr.name)
            if ast.group_by and item.expr.name not in grouped_names:
                raise SchemaError(
                    f"column {item.expr.name!r} must appear in GROUP BY or inside COUNT"
                )
            proj_specs.append(("col", idx))
            out_cols.append(ColumnMeta(item.output_name, schema.columns[idx].dtype))

    names = [c.name for c in out_cols]
    if len(set(names)) != len(names):
        raise SchemaError(f"duplicate output column names {names}; add aliases")

    if ast.predicate is not None:
        for cmp in _walk_comparisons(ast.predicate):
            idx = resolve(cmp.column.name)
            dtype = schema.columns[idx].dtype
            if not _literal_compatible(dtype, cmp.literal):
                raise SchemaError(
                    f"literal {cmp.literal!r} is not comparable with column "
                    f"{cmp.column.name!r} of dtype {dtype}"
                )

    return CheckedQuery(
        ast, schema, tuple(out_cols), col_index, group_indices, tuple(proj_specs)
    )
