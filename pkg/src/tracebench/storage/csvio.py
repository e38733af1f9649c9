"""CSV ingestion and export.

Dialect: comma delimiter, double-quote quoting with doubled-quote escape,
LF or CRLF line endings.  Blank lines are skipped.  Files containing NUL
bytes are rejected (text cells cannot carry NUL; see write_table).

Dtype inference, applied per column over non-empty cells: int64 when
every cell parses as an integer that fits 64 bits; otherwise float64 when
every cell parses as a decimal (scientific notation allowed; nan/inf
spellings do not count as numbers); otherwise text.  Empty cells are
null.  Headerless files get columns named V1..Vn; header names are kept,
with empty header cells falling back to the positional V<k> name.

Numeric cells are written back with Python's shortest round-trip repr, so
exporting any table and re-importing yields value-identical cells.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import IO, Sequence

import numpy as np
import pandas as pd

from ..errors import StorageError
from .core import FLOAT64, INT64, TEXT, ColumnMeta, Table, default_column_names

_INT64_MIN = -(2**63)
_INT64_MAX = 2**63 - 1


def load_csv(path: str | Path, has_header: bool) -> tuple[list[ColumnMeta], pd.DataFrame]:
    """Parse a CSV file and infer column dtypes.

    Returns column metadata plus a DataFrame whose columns are object
    arrays of Python scalars (int/float/str) with None for nulls.

    Rows with fewer fields than the first row pad with nulls (the pandas
    reader cannot tell a short row from explicit trailing empty cells);
    rows with more fields are a parse error.
    """
    names: list[str] | None = None
    if has_header:
        with open(path, newline="", encoding="utf-8") as fh:
            for rec in csv.reader(fh):
                if rec:
                    names = [
                        n if n.strip() else f"V{k}" for k, n in enumerate(rec, start=1)
                    ]
                    break
        if names is None:
            raise StorageError(f"file {path} has no header row")
        if len(set(names)) != len(names):
            raise StorageError(f"duplicate header names in {path}: {names}")
    # the pandas C reader truncates fields at a NUL byte instead of failing
    with open(path, "rb") as fh:
        while chunk := fh.read(1 << 20):
            if b"\x00" in chunk:
                raise StorageError(f"cannot parse {path}: file contains a NUL byte")
    try:
        df = pd.read_csv(
            path,
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            na_values=[],
            engine="c",
        )
    except pd.errors.EmptyDataError:
        if names is not None:
            df = pd.DataFrame({k: [] for k in range(len(names))})
        else:
            raise StorageError(f"file {path} has no data") from None
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise StorageError(f"cannot parse {path}: {exc}") from None

    if names is None:
        names = default_column_names(df.shape[1])
    if df.shape[1] != len(names):
        raise StorageError(f"header of {path} has {len(names)} fields, data has {df.shape[1]}")
    df.columns = range(df.shape[1])

    columns: list[ColumnMeta] = []
    out = {}
    for j in range(df.shape[1]):
        cells = df[j].to_numpy(dtype=object)
        dtype, values = _infer_column(cells)
        columns.append(ColumnMeta(names[j], dtype))
        out[j] = values
    frame = pd.DataFrame(out, copy=False)
    return columns, frame


def _infer_column(cells: np.ndarray) -> tuple[str, np.ndarray]:
    nonempty = np.array([c != "" for c in cells], dtype=bool)
    values = np.empty(len(cells), dtype=object)
    values[:] = None
    if not nonempty.any():
        return TEXT, values
    sub = pd.Series(cells[nonempty])
    num = pd.to_numeric(sub, errors="coerce")
    numeric = not num.isna().to_numpy().any()
    if numeric and np.isinf(num.to_numpy(dtype=np.float64)).any():
        numeric = False  # inf spellings are stored as text
    if numeric:
        kind = num.dtype.kind
        if kind in "iu":
            ints = num.to_numpy()
            if kind == "u" and ints.max() > _INT64_MAX:
                values[nonempty] = num.astype(np.float64).tolist()
                return FLOAT64, values
            values[nonempty] = [int(v) for v in ints.tolist()]
            return INT64, values
        values[nonempty] = num.astype(np.float64).tolist()
        return FLOAT64, values
    values[nonempty] = cells[nonempty]
    return TEXT, values


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows_csv(fh: IO[str], rows: Sequence[tuple]) -> None:
    """Write row tuples in the export dialect.

    A row whose every field serializes to the empty string would come out
    as a blank line (which readers skip), so such rows are written as
    explicitly quoted empty fields instead.
    """
    writer = csv.writer(fh)
    for row in rows:
        out = [format_cell(v) for v in row]
        if all(s == "" for s in out):
            fh.write(",".join(['""'] * len(out)) + "\r\n")
        else:
            writer.writerow(out)


def parse_cell(dtype: str, text: str):
    if text == "":
        return None
    if dtype == INT64:
        return int(text)
    if dtype == FLOAT64:
        return float(text)
    return text


def read_rows_csv(fh: IO[str], dtypes: Sequence[str]) -> list[tuple]:
    rows = []
    for rec in csv.reader(fh):
        if not rec:
            continue
        if len(rec) != len(dtypes):
            raise StorageError(f"partition row has {len(rec)} fields, expected {len(dtypes)}")
        rows.append(tuple(parse_cell(d, c) for d, c in zip(dtypes, rec)))
    return rows


def export_table_csv(table: Table, path: str | Path, header: bool = False) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if header:
            csv.writer(fh).writerow(table.column_names())
        write_rows_csv(fh, table.rows)
