"""Storage handles, table metadata and cross-backend transfer.

Cells are plain Python scalars (int, float, str or None for null); a
column's cells all match its declared dtype.  Tables are immutable once
written: imports, query results and transfers always create new tables,
and the only destructive operation is drop_table.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import StorageError

INT64 = "int64"
FLOAT64 = "float64"
TEXT = "text"
DTYPES = (INT64, FLOAT64, TEXT)

KIND_RELATIONAL = "relational"
KIND_PARTITIONED = "partitioned"

ORIGIN_IMPORTED = "imported"
ORIGIN_QUERY = "query_result"
ORIGIN_TRANSFERRED = "transferred"


@dataclass(frozen=True)
class ColumnMeta:
    name: str
    dtype: str

    def to_json(self) -> dict:
        return {"name": self.name, "dtype": self.dtype}

    @staticmethod
    def from_json(obj: dict) -> "ColumnMeta":
        return ColumnMeta(obj["name"], obj["dtype"])


@dataclass(frozen=True)
class TableMeta:
    name: str
    columns: tuple[ColumnMeta, ...]
    row_count: int
    origin: str

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise StorageError(f"no column named {name!r} in table {self.name!r}")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "columns": [c.to_json() for c in self.columns],
            "row_count": self.row_count,
            "origin": self.origin,
        }

    @staticmethod
    def from_json(obj: dict) -> "TableMeta":
        return TableMeta(
            obj["name"],
            tuple(ColumnMeta.from_json(c) for c in obj["columns"]),
            obj["row_count"],
            obj["origin"],
        )


@dataclass
class Table:
    """Fully materialized table: column metadata plus row tuples."""

    columns: list[ColumnMeta]
    rows: list[tuple]

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column_index(self, name: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == name:
                return i
        raise StorageError(f"no column named {name!r}")

    def column_values(self, index: int) -> list:
        return [r[index] for r in self.rows]


def default_column_names(n: int) -> list[str]:
    return [f"V{k}" for k in range(1, n + 1)]


def cell_matches(dtype: str, value) -> bool:
    if value is None:
        return True
    if dtype == INT64:
        return isinstance(value, int) and not isinstance(value, bool)
    if dtype == FLOAT64:
        return isinstance(value, float)
    if dtype == TEXT:
        return isinstance(value, str)
    return False


def check_columns(columns: Sequence[ColumnMeta]) -> None:
    if not columns:
        raise StorageError("a table needs at least one column")
    names = [c.name for c in columns]
    if len(set(names)) != len(names):
        raise StorageError(f"duplicate column names: {names}")
    for c in columns:
        if c.dtype not in DTYPES:
            raise StorageError(f"unknown dtype {c.dtype!r}")


class StorageHandle:
    """Base class for concrete backends.

    Writes (import, transfer-in, result registration, drop) are
    serialized by a per-handle lock; reads take the same lock, which is
    safe for concurrent callers though not parallel.  The kind of a
    handle never changes after creation.
    """

    kind: str = ""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.id = self.root.name
        self._lock = threading.RLock()

    # -- catalog ----------------------------------------------------------
    def list_tables(self) -> list[TableMeta]:
        with self._lock:
            return sorted(self._catalog().values(), key=lambda m: m.name)

    def table_meta(self, name: str) -> TableMeta:
        with self._lock:
            cat = self._catalog()
            if name not in cat:
                raise StorageError(f"table {name!r} not found in storage {self.id!r}")
            return cat[name]

    def has_table(self, name: str) -> bool:
        with self._lock:
            return name in self._catalog()

    # -- data -------------------------------------------------------------
    def read_table(self, name: str) -> Table:
        with self._lock:
            meta = self.table_meta(name)
            return Table(list(meta.columns), self._read_rows(meta))

    def write_table(
        self,
        name: str,
        columns: Sequence[ColumnMeta],
        rows: Iterable[tuple],
        origin: str,
        validate: bool = True,
    ) -> TableMeta:
        with self._lock:
            check_columns(columns)
            if self.has_table(name):
                raise StorageError(f"table {name!r} already exists in storage {self.id!r}")
            # the interchange format spells null as an empty cell, so empty
            # text is unrepresentable; normalize it to null on every backend
            rows = [tuple(None if v == "" else v for v in r) for r in rows]
            if validate:
                for r in rows:
                    if len(r) != len(columns):
                        raise StorageError(
                            f"row arity {len(r)} does not match {len(columns)} columns"
                        )
                    for c, v in zip(columns, r):
                        if not cell_matches(c.dtype, v):
                            raise StorageError(
                                f"cell {v!r} does not match dtype {c.dtype} of column {c.name!r}"
                            )
                        # the CSV interchange layer cannot carry NUL, and the
                        # readers around it truncate silently; refuse it here
                        if c.dtype == TEXT and v is not None and "\x00" in v:
                            raise StorageError(
                                f"text cell in column {c.name!r} contains a NUL character"
                            )
            meta = TableMeta(name, tuple(columns), len(rows), origin)
            self._write_rows(meta, rows)
            return meta

    def drop_table(self, name: str) -> None:
        with self._lock:
            self.table_meta(name)
            self._drop(name)

    def close(self) -> None:
        pass

    # -- backend hooks ----------------------------------------------------
    def _catalog(self) -> dict[str, TableMeta]:
        raise NotImplementedError

    def _read_rows(self, meta: TableMeta) -> list[tuple]:
        raise NotImplementedError

    def _write_rows(self, meta: TableMeta, rows: list[tuple]) -> None:
        raise NotImplementedError

    def _write_dataframe(self, meta: TableMeta, df) -> None:
        # bulk import fast path; default goes through row tuples
        self._write_rows(meta, list(df.itertuples(index=False, name=None)))

    def _drop(self, name: str) -> None:
        raise NotImplementedError


def create_storage(kind: str, root: str | Path) -> StorageHandle:
    """Create an empty storage of the given kind at root."""
    from .partitioned import PartitionedStorage
    from .relational import RelationalStorage

    root = Path(root)
    if root.exists() and (root.is_file() or any(root.iterdir())):
        raise StorageError(f"path {root} already exists; use open_storage to reopen")
    if kind == KIND_RELATIONAL:
        return RelationalStorage.create(root)
    if kind == KIND_PARTITIONED:
        return PartitionedStorage.create(root)
    raise StorageError(f"unknown backend kind {kind!r}")


def open_storage(root: str | Path) -> StorageHandle:
    """Open an existing storage, detecting its kind from the on-disk layout."""
    from .partitioned import PartitionedStorage
    from .relational import RelationalStorage

    root = Path(root)
    if root.is_file():
        return RelationalStorage.open(root)
    if root.is_dir() and (root / "catalog.json").exists():
        return PartitionedStorage.open(root)
    raise StorageError(f"no storage found at {root}")


def import_csv(
    storage: StorageHandle, file: str | Path, table: str, has_header: bool = False
) -> TableMeta:
    """Import a CSV file as a new table; see csvio for the dialect and inference rules."""
    from . import csvio

    path = Path(file)
    if not path.exists():
        raise StorageError(f"file not found: {path}")
    if storage.has_table(table):
        raise StorageError(f"table {table!r} already exists in storage {storage.id!r}")
    columns, df = csvio.load_csv(path, has_header)
    meta = TableMeta(table, tuple(columns), len(df), ORIGIN_IMPORTED)
    with storage._lock:
        if storage.has_table(table):
            raise StorageError(f"table {table!r} already exists in storage {storage.id!r}")
        storage._write_dataframe(meta, df)
    return meta


def transfer_table(src: StorageHandle, table: str, dst: StorageHandle) -> TableMeta:
    """Copy a table row-for-row into another storage; the source is untouched."""
    if dst.has_table(table):
        raise StorageError(f"table {table!r} already exists in storage {dst.id!r}")
    data = src.read_table(table)
    return dst.write_table(table, data.columns, data.rows, ORIGIN_TRANSFERRED, validate=False)
