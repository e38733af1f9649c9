"""Embedded single-file relational backend (SQLite).

The storage root is the database file itself.  The catalog lives in a
``_catalog`` table inside the same file, so reopening the file recovers
the full table inventory.  Execution plans for this backend are
translated to native SQL by the query planner and run here.
"""

from __future__ import annotations

import json
import sqlite3
from pathlib import Path
from typing import Sequence

from ..errors import StorageError
from .core import (
    FLOAT64,
    INT64,
    KIND_RELATIONAL,
    StorageHandle,
    TableMeta,
)

_SQL_TYPES = {INT64: "INTEGER", FLOAT64: "REAL", "text": "TEXT"}


def quote_ident(name: str) -> str:
    return '"' + name.replace('"', '""') + '"'


class RelationalStorage(StorageHandle):
    kind = KIND_RELATIONAL

    def __init__(self, root: Path):
        super().__init__(root)
        try:
            self._conn = sqlite3.connect(str(root), check_same_thread=False)
            self._conn.isolation_level = None
            self._conn.execute("PRAGMA synchronous=NORMAL")
        except sqlite3.Error as exc:
            raise StorageError(f"cannot open {root}: {exc}") from None

    @classmethod
    def create(cls, root: Path) -> "RelationalStorage":
        root.parent.mkdir(parents=True, exist_ok=True)
        if root.exists():
            raise StorageError(f"{root} already exists")
        store = cls(root)
        with store._lock:
            store._conn.execute(
                "CREATE TABLE _catalog (name TEXT PRIMARY KEY, meta TEXT NOT NULL)"
            )
        return store

    @classmethod
    def open(cls, root: Path) -> "RelationalStorage":
        if not root.is_file():
            raise StorageError(f"no storage file at {root}")
        store = cls(root)
        store._catalog()  # fails early on corrupt files
        return store

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- backend hooks ----------------------------------------------------
    def _catalog(self) -> dict[str, TableMeta]:
        try:
            cur = self._conn.execute("SELECT name, meta FROM _catalog")
            return {name: TableMeta.from_json(json.loads(meta)) for name, meta in cur}
        except (sqlite3.Error, json.JSONDecodeError, KeyError) as exc:
            raise StorageError(f"corrupt catalog in {self.root}: {exc}") from None

    def _read_rows(self, meta: TableMeta) -> list[tuple]:
        cur = self._conn.execute(f"SELECT * FROM {quote_ident(meta.name)} ORDER BY rowid")
        return cur.fetchall()

    def _create_sql(self, meta: TableMeta) -> str:
        cols = ", ".join(f"{quote_ident(c.name)} {_SQL_TYPES[c.dtype]}" for c in meta.columns)
        return f"CREATE TABLE {quote_ident(meta.name)} ({cols})"

    def _register(self, meta: TableMeta) -> None:
        self._conn.execute(
            "INSERT INTO _catalog (name, meta) VALUES (?, ?)",
            (meta.name, json.dumps(meta.to_json())),
        )

    def _write_rows(self, meta: TableMeta, rows: list[tuple]) -> None:
        placeholders = ", ".join("?" * len(meta.columns))
        try:
            self._conn.execute("BEGIN IMMEDIATE")
            self._conn.execute(self._create_sql(meta))
            self._conn.executemany(
                f"INSERT INTO {quote_ident(meta.name)} VALUES ({placeholders})", rows
            )
            self._register(meta)
            self._conn.execute("COMMIT")
        except sqlite3.Error as exc:
            self._conn.execute("ROLLBACK")
            raise StorageError(f"failed to write table {meta.name!r}: {exc}") from None

    def _write_dataframe(self, meta: TableMeta, df) -> None:
        cols = [df[j].to_numpy(dtype=object) for j in range(df.shape[1])]
        self._write_rows(meta, zip(*cols) if cols else [])

    def _drop(self, name: str) -> None:
        self._conn.execute("BEGIN IMMEDIATE")
        self._conn.execute(f"DROP TABLE {quote_ident(name)}")
        self._conn.execute("DELETE FROM _catalog WHERE name = ?", (name,))
        self._conn.execute("COMMIT")

    # -- native plan execution -------------------------------------------
    def run_select(self, sql: str, params: Sequence = ()) -> list[tuple]:
        with self._lock:
            try:
                return self._conn.execute(sql, tuple(params)).fetchall()
            except sqlite3.Error as exc:
                raise StorageError(f"query failed: {exc}\nsql: {sql}") from None

    def create_table_from_select(
        self, meta: TableMeta, select_sql: str, params: Sequence = ()
    ) -> TableMeta:
        """Materialize a SELECT into a new catalogued table, atomically."""
        with self._lock:
            if self.has_table(meta.name):
                raise StorageError(f"table {meta.name!r} already exists in storage {self.id!r}")
            try:
                self._conn.execute("BEGIN IMMEDIATE")
                self._conn.execute(self._create_sql(meta))
                cur = self._conn.execute(
                    f"INSERT INTO {quote_ident(meta.name)} {select_sql}", tuple(params)
                )
                n = cur.rowcount
                final = TableMeta(meta.name, meta.columns, n, meta.origin)
                self._register(final)
                self._conn.execute("COMMIT")
                return final
            except sqlite3.Error as exc:
                self._conn.execute("ROLLBACK")
                raise StorageError(
                    f"failed to execute plan for {meta.name!r}: {exc}\nsql: {select_sql}"
                ) from None
