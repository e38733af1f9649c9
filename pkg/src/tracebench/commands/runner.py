"""Executes rendered command scripts against a table.

The registry is a router: scripts are call-syntax programs whose
operation names resolve to analysis functions, except the map-reduce
group-count which runs against the storage backend.  Each statement
receives the current buffer as ``t``; a statement returning a table
becomes the buffer for the next one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import CommandError, TracebenchError
from ..expr import (
    Call,
    Evaluator,
    Name,
    parse_program,
    predicate_from_node,
    unary_from_node,
)
from ..stats import analysis
from ..storage.core import FLOAT64, INT64, TEXT, ColumnMeta, StorageHandle, Table
from ..storage.mapreduce import (
    MapReduceJob,
    builtin_count_reduce,
    builtin_group_key_map,
    run_mapreduce,
)
from .registry import CommandRegistry, instantiate

RESULT_TABLE = "table"
RESULT_DISTRIBUTION = "distribution"
RESULT_POLYFIT = "polyfit"
RESULT_PLOT = "plot"


@dataclass
class CommandResult:
    kind: str
    value: object
    plots: list = field(default_factory=list)

    def to_json(self) -> dict:
        doc: dict = {"kind": self.kind, "plots": [p.to_json() for p in self.plots]}
        if self.kind == RESULT_TABLE:
            t: Table = self.value
            doc["columns"] = [{"name": c.name, "dtype": c.dtype} for c in t.columns]
            doc["rows"] = [list(r) for r in t.rows]
        elif self.kind in (RESULT_DISTRIBUTION, RESULT_POLYFIT):
            doc["fit"] = self.value.to_json()
        return doc


def _infer_dtype(cells) -> str:
    has_float = False
    for v in cells:
        if v is None:
            continue
        if isinstance(v, str):
            return TEXT
        if isinstance(v, float):
            has_float = True
    return FLOAT64 if has_float else INT64


def _column_table(name: str, cells) -> Table:
    return Table((ColumnMeta(name, _infer_dtype(cells)),), [(v,) for v in cells])


class CommandRunner:
    def __init__(self, registry: CommandRegistry):
        self.registry = registry

    # --- public entry points ---------------------------------------------

    def run(
        self,
        storage: StorageHandle | None,
        table,
        name: str,
        args,
        script_override: str | None = None,
    ) -> CommandResult:
        spec = self.registry.get(name)
        inv = instantiate(spec, args)
        script = inv.rendered if script_override is None else script_override
        table_name = table if isinstance(table, str) else None
        buffer = self._resolve_table(storage, table)
        return self.run_script(storage, buffer, script, table_name=table_name)

    def run_pipeline(self, storage, table, steps) -> list[CommandResult]:
        """steps: iterable of (name, args) or (name, args, script_override)."""
        results = []
        current = table
        for step in steps:
            name, args, *rest = step
            override = rest[0] if rest else None
            res = self.run(storage, current, name, args, script_override=override)
            results.append(res)
            if res.kind == RESULT_TABLE:
                current = res.value
        return results

    def run_script(
        self, storage, buffer: Table, script: str, table_name: str | None = None
    ) -> CommandResult:
        try:
            statements = parse_program(script)
        except TracebenchError as exc:
            raise CommandError(f"script does not parse: {exc}", script=script) from exc
        if not statements:
            raise CommandError("empty script", script=script)
        result = None
        for node in statements:
            if not isinstance(node, Call):
                raise CommandError(
                    "each script statement must be an operation call", script=script
                )
            try:
                result = self._dispatch(storage, buffer, node, table_name)
            except CommandError:
                raise
            except TracebenchError as exc:
                raise CommandError(str(exc), script=script) from exc
            if result.kind == RESULT_TABLE:
                buffer = result.value
        return result

    # --- helpers ----------------------------------------------------------

    def _resolve_table(self, storage, table) -> Table:
        if isinstance(table, Table):
            return table
        if storage is None:
            raise CommandError(f"no storage to read table {table!r} from")
        return storage.read_table(table)

    def _scalar(self, node):
        return Evaluator().eval(node)

    def _int_arg(self, node, what: str) -> int:
        v = self._scalar(node)
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
            raise CommandError(f"{what} must be an integer, got {v!r}")
        return int(v)

    def _float_arg(self, node, what: str) -> float:
        v = self._scalar(node)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise CommandError(f"{what} must be a number, got {v!r}")
        return float(v)

    def _word_arg(self, node, what: str) -> str:
        # bare words (count, xy) arrive as names; quoted strings also fine
        if isinstance(node, Name):
            return node.ident
        v = self._scalar(node)
        if not isinstance(v, str):
            raise CommandError(f"{what} must be a word, got {v!r}")
        return v

    def _numeric_column(self, buffer: Table, index: int) -> analysis.NumericVector:
        vec = analysis.get_column(buffer, index)
        if isinstance(vec, Table):
            name = buffer.columns[index - 1].name
            raise CommandError(f"column {index} ({name!r}) is not numeric")
        return vec

    @staticmethod
    def _check_t(node: Call, script_args) -> list:
        if not script_args or not (
            isinstance(script_args[0], Name) and script_args[0].ident == "t"
        ):
            raise CommandError(f"{node.fn}: first argument must be the table t")
        return list(script_args[1:])

    # --- dispatch ---------------------------------------------------------

    def _dispatch(self, storage, buffer: Table, node: Call, table_name) -> CommandResult:
        op = node.fn
        args = self._check_t(node, node.args)

        def need(n: int):
            if len(args) != n:
                raise CommandError(f"{op} takes {n} argument(s) besides t, got {len(args)}")

        if op == "get_column":
            need(1)
            k = self._int_arg(args[0], "column number")
            analysis.get_column(buffer, k)  # validates range and nulls
            cells = [row[k - 1] for row in buffer.rows]
            col = buffer.columns[k - 1]
            return CommandResult(RESULT_TABLE, Table((col,), [(v,) for v in cells]))

        if op == "apply_1Col":
            need(1)
            vec = self._numeric_column(buffer, 1)
            out = analysis.apply_1col(vec, unary_from_node(args[0]))
            return CommandResult(
                RESULT_TABLE, _column_table(buffer.columns[0].name, out.tolist())
            )

        if op == "aggregate":
            need(3)
            k = self._int_arg(args[0], "group column")
            pred = predicate_from_node(args[1])
            fn = self._word_arg(args[2], "reducer")
            return CommandResult(RESULT_TABLE, analysis.aggregate_rows(buffer, k, pred, fn))

        if op == "difference_between_rows":
            need(0)
            self._numeric_column(buffer, 1)  # rejects text and null cells
            if len(buffer.rows) < 2:
                raise CommandError("need at least two rows to difference")
            cells = [row[0] for row in buffer.rows]
            diffs = [b - a for a, b in zip(cells, cells[1:])]
            return CommandResult(
                RESULT_TABLE, _column_table(buffer.columns[0].name, diffs)
            )

        if op == "filter":
            need(1)
            return CommandResult(
                RESULT_TABLE, analysis.filter_rows(buffer, predicate_from_node(args[0]))
            )

        if op == "exponential_distribution":
            need(0)
            dist, plots = analysis.fit_exponential(self._numeric_column(buffer, 1))
            return CommandResult(RESULT_DISTRIBUTION, dist, plots)

        if op == "lognormal_distribution":
            need(0)
            dist, plots = analysis.fit_lognormal(self._numeric_column(buffer, 1))
            return CommandResult(RESULT_DISTRIBUTION, dist, plots)

        if op == "polynomial_regression":
            need(1)
            degree = self._int_arg(args[0], "degree")
            fit, plot = analysis.polynomial_regression(
                self._numeric_column(buffer, 1), degree
            )
            return CommandResult(RESULT_POLYFIT, fit, [plot])

        if op == "ecdf":
            need(0)
            dist, plot = analysis.compute_ecdf(self._numeric_column(buffer, 1))
            return CommandResult(RESULT_DISTRIBUTION, dist, [plot])

        if op == "spline":
            need(1)
            n = self._int_arg(args[0], "number of intervals")
            dist, plot = analysis.fit_spline_cdf(self._numeric_column(buffer, 1), n)
            return CommandResult(RESULT_DISTRIBUTION, dist, [plot])

        if op == "log_histogram":
            need(3)
            k = self._int_arg(args[0], "column number")
            step = self._float_arg(args[1], "log step")
            axes = self._word_arg(args[2], "axes")
            plot = analysis.log_histogram(self._numeric_column(buffer, k), step, axes)
            return CommandResult(RESULT_PLOT, plot, [plot])

        if op == "mapreduce_count":
            need(2)
            k = self._int_arg(args[0], "group column")
            dest = self._word_arg(args[1], "destination table")
            return self._mapreduce_count(storage, table_name, k, dest)

        raise CommandError(f"unknown operation {op!r}")

    def _mapreduce_count(self, storage, table_name, k: int, dest: str) -> CommandResult:
        if storage is None or table_name is None:
            raise CommandError("mapreduce_count needs a stored table, not a buffer")
        if not hasattr(storage, "partitions"):
            raise CommandError("mapreduce_count runs on partitioned storage only")
        meta = storage.table_meta(table_name)
        if not 1 <= k <= len(meta.columns):
            raise CommandError(f"group column {k} out of range")
        job = MapReduceJob(
            input_table=table_name,
            output_table=dest,
            output_columns=(meta.columns[k - 1], ColumnMeta("count", INT64)),
            map_fn=builtin_group_key_map((k - 1,)),
            reduce_fn=builtin_count_reduce(),
        )
        run_mapreduce(job, storage)
        return CommandResult(RESULT_TABLE, storage.read_table(dest))
