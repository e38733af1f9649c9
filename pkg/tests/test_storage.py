import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tracebench.errors import StorageError
from tracebench.storage.core import (
    ColumnMeta,
    Table,
    create_storage,
    import_csv,
    open_storage,
    transfer_table,
)
from tracebench.storage.partitioned import PartitionedStorage

from conftest import write_csv


def test_import_infers_mixed_dtypes(any_storage, tmp_path):
    path = write_csv(
        tmp_path / "mix.csv",
        [(1, 1.5, "abc"), (2, "", "de"), ("", 3.0, "")],
    )
    meta = import_csv(any_storage, path, "mix")
    assert [c.dtype for c in meta.columns] == ["int64", "float64", "text"]
    data = any_storage.read_table("mix")
    assert data.rows == [(1, 1.5, "abc"), (2, None, "de"), (None, 3.0, None)]


def test_import_header_names_kept(any_storage, tmp_path):
    path = (tmp_path / "h.csv")
    path.write_text("when,who\n1,alice\n2,bob\n")
    meta = import_csv(any_storage, path, "h", has_header=True)
    assert meta.column_names() == ["when", "who"]


def test_import_headerless_names_are_v1_vn(any_storage, tmp_path):
    path = write_csv(tmp_path / "n.csv", [(1, 2, 3)])
    meta = import_csv(any_storage, path, "n")
    assert meta.column_names() == ["V1", "V2", "V3"]


def test_import_collision_rejected(any_storage, tmp_path):
    path = write_csv(tmp_path / "c.csv", [(1,)])
    import_csv(any_storage, path, "c")
    with pytest.raises(StorageError, match="already exists"):
        import_csv(any_storage, path, "c")


def test_missing_file_rejected(any_storage):
    with pytest.raises(StorageError, match="not found"):
        import_csv(any_storage, "/nonexistent/x.csv", "t")


def test_write_read_roundtrip(any_storage):
    cols = (ColumnMeta("a", "int64"), ColumnMeta("b", "text"))
    rows = [(1, "x"), (None, None), (3, "comma, inside"), (4, 'quote " inside')]
    any_storage.write_table("t", cols, rows, "imported")
    assert any_storage.read_table("t").rows == rows


def test_reopen_detects_kind(tmp_path):
    for kind in ("relational", "partitioned"):
        s = create_storage(kind, tmp_path / kind)
        s.write_table("t", (ColumnMeta("a", "int64"),), [(7,)], "imported")
        s.close()
        again = open_storage(tmp_path / kind)
        assert again.kind == kind
        assert again.read_table("t").rows == [(7,)]


def test_create_on_nonempty_path_rejected(tmp_path):
    (tmp_path / "busy").mkdir()
    (tmp_path / "busy" / "junk").write_text("x")
    with pytest.raises(StorageError, match="already exists"):
        create_storage("relational", tmp_path / "busy")


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(StorageError, match="unknown backend"):
        create_storage("columnar", tmp_path / "x")


def test_open_nothing_rejected(tmp_path):
    with pytest.raises(StorageError, match="no storage"):
        open_storage(tmp_path / "void")


def test_drop_table(any_storage):
    any_storage.write_table("t", (ColumnMeta("a", "int64"),), [(1,)], "imported")
    any_storage.drop_table("t")
    assert not any_storage.has_table("t")
    with pytest.raises(StorageError):
        any_storage.read_table("t")


def test_partition_split_and_manifest(tmp_path):
    store = PartitionedStorage.create(tmp_path / "p", part_rows=100)
    rows = [(i, float(i) / 2) for i in range(351)]
    cols = (ColumnMeta("a", "int64"), ColumnMeta("b", "float64"))
    store.write_table("t", cols, rows, "imported")
    parts = store.partitions("t")
    assert len(parts) == 4  # 100+100+100+51
    assert store.read_table("t").rows == rows
    # partitions hold contiguous row ranges in order
    dtypes = [c.dtype for c in cols]
    collected = []
    for part in parts:
        collected.extend(store.read_partition(part, dtypes))
    assert collected == rows


def test_transfer_between_kinds(tmp_path):
    a = create_storage("relational", tmp_path / "a")
    b = create_storage("partitioned", tmp_path / "b")
    rows = [(i, f"s{i}") for i in range(500)]
    a.write_table("t", (ColumnMeta("x", "int64"), ColumnMeta("y", "text")), rows, "imported")
    meta = transfer_table(a, "t", b)
    assert meta.origin == "transferred"
    assert b.read_table("t").rows == rows
    with pytest.raises(StorageError, match="already exists"):
        transfer_table(a, "t", b)


def test_table_helpers():
    t = Table(
        (ColumnMeta("a", "int64"), ColumnMeta("b", "text")),
        [(1, "x"), (2, "y")],
    )
    assert t.n_cols == 2
    assert t.column_names() == ["a", "b"]
    assert t.column_index("b") == 1
    assert t.column_values(0) == [1, 2]


_CELLS = {
    "int64": st.none() | st.integers(-(2**62), 2**62),
    "float64": st.none() | st.floats(allow_nan=False, allow_infinity=False, width=64),
    # NUL is outside the text value domain (write_table rejects it)
    "text": st.none()
    | st.text(
        st.characters(blacklist_categories=("Cs",), blacklist_characters="\x00"),
        max_size=12,
    ),
}


@st.composite
def typed_table(draw):
    dtypes = draw(st.lists(st.sampled_from(sorted(_CELLS)), min_size=1, max_size=4))
    n_rows = draw(st.integers(0, 30))
    rows = [
        tuple(draw(_CELLS[d]) for d in dtypes) for _ in range(n_rows)
    ]
    cols = tuple(ColumnMeta(f"c{i}", d) for i, d in enumerate(dtypes))
    return cols, rows


@given(typed_table(), st.sampled_from(["relational", "partitioned"]))
@settings(max_examples=40, deadline=None)
def test_roundtrip_any_cells(tmp_path_factory, table, kind):
    cols, rows = table
    store = create_storage(kind, tmp_path_factory.mktemp("rt") / "s")
    store.write_table("t", cols, rows, "imported")
    # empty text is the null spelling in the interchange format, so it
    # normalizes to null on write
    expected = [tuple(None if v == "" else v for v in r) for r in rows]
    assert store.read_table("t").rows == expected


@pytest.mark.parametrize("kind", ["relational", "partitioned"])
def test_nul_text_rejected_on_write(tmp_path, kind):
    store = create_storage(kind, tmp_path / "s")
    with pytest.raises(StorageError, match="NUL"):
        store.write_table("t", (ColumnMeta("c", "text"),), [("a\x00b",)], "imported")
    assert not store.has_table("t")


def test_nul_byte_rejected_on_import(tmp_path):
    # the pandas reader would silently truncate the field at the NUL
    path = tmp_path / "nul.csv"
    path.write_bytes(b"1,a\x00b\n2,cd\n")
    store = create_storage("relational", tmp_path / "s")
    with pytest.raises(StorageError, match="NUL byte"):
        import_csv(store, path, "t")
