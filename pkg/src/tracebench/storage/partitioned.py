"""Partitioned-file backend.

Each table is a directory of fixed-size row-range partition files
(CSV, 64k rows per partition by default); a single ``catalog.json``
manifest at the storage root lists tables, columns, dtypes and partition
row counts.  The local map-reduce runtime consumes tables partition by
partition.
"""

from __future__ import annotations

import json
import os
import shutil
import uuid
from dataclasses import dataclass
from pathlib import Path

from ..errors import StorageError
from .core import KIND_PARTITIONED, StorageHandle, TableMeta
from .csvio import read_rows_csv, write_rows_csv

DEFAULT_PART_ROWS = 65536


@dataclass(frozen=True)
class Partition:
    table: str
    index: int
    row_range: tuple[int, int]  # [start, end)
    file: Path


class PartitionedStorage(StorageHandle):
    kind = KIND_PARTITIONED

    def __init__(self, root: Path, part_rows: int = DEFAULT_PART_ROWS):
        super().__init__(root)
        self.part_rows = part_rows
        self._cat_path = self.root / "catalog.json"

    @classmethod
    def create(cls, root: Path, part_rows: int = DEFAULT_PART_ROWS) -> "PartitionedStorage":
        root = Path(root)
        root.mkdir(parents=True, exist_ok=True)
        store = cls(root, part_rows)
        store._save_manifest({})
        return store

    @classmethod
    def open(cls, root: Path) -> "PartitionedStorage":
        store = cls(Path(root))
        store._load_manifest()
        return store

    # -- manifest ---------------------------------------------------------
    def _load_manifest(self) -> dict:
        try:
            with open(self._cat_path, encoding="utf-8") as fh:
                doc = json.load(fh)
            if doc.get("kind") != KIND_PARTITIONED:
                raise StorageError(f"{self._cat_path} is not a partitioned-storage manifest")
            return doc["tables"]
        except FileNotFoundError:
            raise StorageError(f"no storage manifest at {self._cat_path}") from None
        except (json.JSONDecodeError, KeyError) as exc:
            raise StorageError(f"corrupt manifest {self._cat_path}: {exc}") from None

    def _save_manifest(self, tables: dict) -> None:
        doc = {"schema_version": 1, "kind": KIND_PARTITIONED, "tables": tables}
        tmp = self._cat_path.with_suffix(".json.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=True)
        os.replace(tmp, self._cat_path)

    # -- backend hooks ----------------------------------------------------
    def _catalog(self) -> dict[str, TableMeta]:
        return {
            name: TableMeta.from_json(ent["meta"]) for name, ent in self._load_manifest().items()
        }

    def _table_dir(self, name: str) -> Path:
        return self.root / "tables" / name

    def partitions(self, name: str) -> list[Partition]:
        with self._lock:
            ent = self._load_manifest().get(name)
            if ent is None:
                raise StorageError(f"table {name!r} not found in storage {self.id!r}")
            parts = []
            start = 0
            for i, count in enumerate(ent["partitions"]):
                parts.append(
                    Partition(name, i, (start, start + count), self._table_dir(name) / _part_name(i))
                )
                start += count
            return parts

    def read_partition(self, part: Partition, dtypes: list[str]) -> list[tuple]:
        with open(part.file, newline="", encoding="utf-8") as fh:
            return read_rows_csv(fh, dtypes)

    def _read_rows(self, meta: TableMeta) -> list[tuple]:
        dtypes = [c.dtype for c in meta.columns]
        rows: list[tuple] = []
        for part in self.partitions(meta.name):
            rows.extend(self.read_partition(part, dtypes))
        return rows

    def _write_parts(self, meta: TableMeta, write_chunks) -> None:
        """Write partition files to a scratch dir, then publish atomically.

        write_chunks(dir) must create the part files and return their row
        counts.  The manifest is updated last, so a failure mid-write
        leaves no catalogued partial table.
        """
        final_dir = self._table_dir(meta.name)
        tmp_dir = self.root / "tables" / f".tmp-{uuid.uuid4().hex}"
        tmp_dir.mkdir(parents=True)
        try:
            counts = write_chunks(tmp_dir)
            os.replace(tmp_dir, final_dir)
        except BaseException:
            shutil.rmtree(tmp_dir, ignore_errors=True)
            raise
        tables = self._load_manifest()
        tables[meta.name] = {"meta": meta.to_json(), "partitions": counts}
        self._save_manifest(tables)

    def _write_rows(self, meta: TableMeta, rows: list[tuple]) -> None:
        def chunks(target: Path) -> list[int]:
            counts = []
            if not rows:
                return counts
            for i, start in enumerate(range(0, len(rows), self.part_rows)):
                chunk = rows[start : start + self.part_rows]
                with open(target / _part_name(i), "w", newline="", encoding="utf-8") as fh:
                    write_rows_csv(fh, chunk)
                counts.append(len(chunk))
            return counts

        with self._lock:
            self._write_parts(meta, chunks)

    def _write_dataframe(self, meta: TableMeta, df) -> None:
        if df.shape[1] == 1:
            # single-column tables need the blank-row quoting rule
            super()._write_dataframe(meta, df)
            return

        def chunks(target: Path) -> list[int]:
            counts = []
            n = len(df)
            for i, start in enumerate(range(0, n, self.part_rows)):
                chunk = df.iloc[start : start + self.part_rows]
                chunk.to_csv(target / _part_name(i), index=False, header=False)
                counts.append(len(chunk))
            return counts

        with self._lock:
            self._write_parts(meta, chunks)

    def _drop(self, name: str) -> None:
        tables = self._load_manifest()
        tables.pop(name, None)
        self._save_manifest(tables)
        shutil.rmtree(self._table_dir(name), ignore_errors=True)


def _part_name(i: int) -> str:
    return f"part-{i:05d}.csv"
