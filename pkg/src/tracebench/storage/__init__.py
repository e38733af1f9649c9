from .core import (
    FLOAT64,
    INT64,
    KIND_PARTITIONED,
    KIND_RELATIONAL,
    ORIGIN_IMPORTED,
    ORIGIN_QUERY,
    ORIGIN_TRANSFERRED,
    TEXT,
    ColumnMeta,
    StorageHandle,
    Table,
    TableMeta,
    create_storage,
    default_column_names,
    import_csv,
    open_storage,
    transfer_table,
)
from .mapreduce import (
    MapReduceJob,
    UdfRegistry,
    UdfSpec,
    builtin_count_reduce,
    builtin_group_key_map,
    run_mapreduce,
)
from .partitioned import Partition, PartitionedStorage
from .relational import RelationalStorage

__all__ = [
    "FLOAT64",
    "INT64",
    "KIND_PARTITIONED",
    "KIND_RELATIONAL",
    "ORIGIN_IMPORTED",
    "ORIGIN_QUERY",
    "ORIGIN_TRANSFERRED",
    "TEXT",
    "ColumnMeta",
    "MapReduceJob",
    "Partition",
    "PartitionedStorage",
    "RelationalStorage",
    "StorageHandle",
    "Table",
    "TableMeta",
    "UdfRegistry",
    "UdfSpec",
    "builtin_count_reduce",
    "builtin_group_key_map",
    "create_storage",
    "default_column_names",
    "import_csv",
    "open_storage",
    "run_mapreduce",
    "transfer_table",
]
