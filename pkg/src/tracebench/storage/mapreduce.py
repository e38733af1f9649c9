"""Local map-reduce runtime over partitioned tables.

Map workers process disjoint partitions in a thread pool; the shuffle
groups emissions by key in partition order, so output is independent of
worker count.  Reduce runs once per key in sorted key order.

User-defined map/reduce functions are written in the sandboxed
expression dialect and loaded from text files shaped like command
files: name line, stage line (``map`` or ``reduce``), then source lines
until a blank line.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..commands.registry import split_blocks
from ..errors import CommandError, EvalError, StorageError
from ..expr import Evaluator, parse_program
from .core import ORIGIN_QUERY, ColumnMeta, StorageHandle, TableMeta

MapFn = Callable[[tuple], list]
ReduceFn = Callable[[object, list], list]


@dataclass
class MapReduceJob:
    input_table: str
    output_table: str
    output_columns: tuple[ColumnMeta, ...]
    map_fn: MapFn
    reduce_fn: ReduceFn
    # applied once to all gathered output rows, e.g. a global DISTINCT
    finalize: Callable[[list], list] | None = None
    origin: str = ORIGIN_QUERY


def builtin_group_key_map(key_indices: tuple[int, ...]) -> MapFn:
    def map_fn(record: tuple) -> list:
        return [(tuple(record[i] for i in key_indices), record)]

    return map_fn


def builtin_count_reduce() -> ReduceFn:
    def reduce_fn(key, records: list) -> list:
        parts = key if isinstance(key, tuple) else (key,)
        return [(*parts, len(records))]

    return reduce_fn


def _key_parts(key) -> tuple:
    return key if isinstance(key, tuple) else (key,)


def _component_rank(value) -> int:
    if value is None:
        return 0
    if isinstance(value, bool):
        raise StorageError("boolean shuffle keys are not supported")
    if isinstance(value, (int, float)):
        return 1
    if isinstance(value, str):
        return 2
    raise StorageError(f"unsupported shuffle key component {value!r}")


def _sorted_keys(keys) -> list:
    """Keys ordered by (rank, value) per component; mixed types rejected."""
    keys = list(keys)
    if not keys:
        return keys
    widths = {len(_key_parts(k)) for k in keys}
    if len(widths) != 1:
        raise StorageError(f"shuffle keys have mixed widths {sorted(widths)}")
    width = widths.pop()
    for pos in range(width):
        ranks = {_component_rank(_key_parts(k)[pos]) for k in keys}
        ranks.discard(0)  # nulls sort before everything and mix freely
        if len(ranks) > 1:
            raise StorageError(
                f"mixed-type shuffle keys at position {pos} (numeric vs text)"
            )

    def proxy(key):
        return tuple(
            (_component_rank(v), 0 if v is None else v) for v in _key_parts(key)
        )

    return sorted(keys, key=proxy)


def run_mapreduce(job: MapReduceJob, storage: StorageHandle, workers: int = 1) -> TableMeta:
    if workers < 1:
        raise StorageError("workers must be >= 1")
    parts = storage.partitions(job.input_table)
    meta = storage.table_meta(job.input_table)
    dtypes = [c.dtype for c in meta.columns]

    def run_map(part):
        emitted = []
        try:
            for record in storage.read_partition(part, dtypes):
                emitted.extend(job.map_fn(record))
        except StorageError:
            raise
        except Exception as exc:
            raise EvalError(
                f"map failed on partition {part.index} of {job.input_table!r}: {exc}"
            ) from exc
        return emitted

    if workers == 1 or len(parts) <= 1:
        mapped = [run_map(p) for p in parts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            mapped = list(pool.map(run_map, parts))

    # shuffle: insertion order is partition order, so grouping is deterministic
    groups: dict = {}
    for emitted in mapped:
        for key, record in emitted:
            groups.setdefault(key, []).append(record)

    rows: list = []
    for key in _sorted_keys(groups):
        try:
            rows.extend(job.reduce_fn(key, groups[key]))
        except StorageError:
            raise
        except Exception as exc:
            raise EvalError(f"reduce failed for key {key!r}: {exc}") from exc

    if job.finalize is not None:
        rows = job.finalize(rows)

    return storage.write_table(job.output_table, job.output_columns, rows, job.origin)


# --- user-defined functions ----------------------------------------------

STAGE_MAP = "map"
STAGE_REDUCE = "reduce"


@dataclass(frozen=True)
class UdfSpec:
    name: str
    stage: str
    source: str

    def __post_init__(self):
        if self.stage not in (STAGE_MAP, STAGE_REDUCE):
            raise CommandError(f"UDF {self.name!r}: unknown stage {self.stage!r}")


def parse_udf_file(path) -> list[UdfSpec]:
    text = Path(path).read_text(encoding="utf-8")
    specs = []
    for block in split_blocks(text):
        if len(block) < 3:
            raise CommandError(
                f"UDF block starting {block[0]!r} needs name, stage and source lines"
            )
        specs.append(UdfSpec(block[0].strip(), block[1].strip(), "\n".join(block[2:])))
    return specs


def make_map_fn(spec: UdfSpec) -> MapFn:
    """Map source sees the record as ``t``; each emit(key, record) is one pair."""
    program = parse_program(spec.source)

    def map_fn(record: tuple) -> list:
        pairs = []

        def emit(*args):
            if len(args) != 2:
                raise EvalError(f"map UDF {spec.name!r}: emit takes (key, record)")
            pairs.append((args[0], args[1]))

        ev = Evaluator({"t": record}, row=record, extra_functions={"emit": emit})
        for stmt in program:
            ev.eval(stmt)
        return pairs

    return map_fn


def make_reduce_fn(spec: UdfSpec) -> ReduceFn:
    """Reduce source sees ``key`` and the record list ``rows``; emit(...) adds a row."""
    program = parse_program(spec.source)

    def reduce_fn(key, records: list) -> list:
        out = []

        def emit(*args):
            if not args:
                raise EvalError(f"reduce UDF {spec.name!r}: emit needs at least one value")
            out.append(tuple(args))

        ev = Evaluator(
            {"key": key, "rows": records}, extra_functions={"emit": emit}
        )
        for stmt in program:
            ev.eval(stmt)
        return out

    return reduce_fn


class UdfRegistry:
    """Named UDFs keyed by (stage, name); duplicate registration is an error."""

    def __init__(self):
        self._specs: dict[tuple[str, str], UdfSpec] = {}

    def register(self, spec: UdfSpec) -> UdfSpec:
        key = (spec.stage, spec.name)
        if key in self._specs:
            raise CommandError(f"duplicate {spec.stage} UDF {spec.name!r}")
        # surfaces parse errors at registration, not first use
        if spec.stage == STAGE_MAP:
            make_map_fn(spec)
        else:
            make_reduce_fn(spec)
        self._specs[key] = spec
        return spec

    def load_file(self, path) -> list[UdfSpec]:
        return [self.register(s) for s in parse_udf_file(path)]

    def get(self, stage: str, name: str) -> UdfSpec:
        try:
            return self._specs[(stage, name)]
        except KeyError:
            raise CommandError(f"unknown {stage} UDF {name!r}") from None

    def map_fn(self, name: str) -> MapFn:
        return make_map_fn(self.get(STAGE_MAP, name))

    def reduce_fn(self, name: str) -> ReduceFn:
        return make_reduce_fn(self.get(STAGE_REDUCE, name))
