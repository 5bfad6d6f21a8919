"""Sharded table store and scatter-gather query execution."""

from sqlgate.storage.errors import (
    AllShardsFailed,
    InvalidProjection,
    SchemaMismatch,
    StorageError,
    TypeMismatch,
    UnknownColumn,
    UnknownTable,
)
from sqlgate.storage.executor import (
    PartialAggregate,
    ResultSet,
    ShardWorker,
    decode_worker_payload,
    execute_distributed,
    execute_local,
    merge_partials,
    merge_rows,
)
from sqlgate.storage.table import ShardedTable, TableStore, shard_for

__all__ = [
    "AllShardsFailed", "InvalidProjection", "SchemaMismatch", "StorageError",
    "TypeMismatch", "UnknownColumn", "UnknownTable", "PartialAggregate",
    "ResultSet", "ShardWorker", "decode_worker_payload",
    "execute_distributed", "execute_local", "merge_partials", "merge_rows",
    "ShardedTable", "TableStore", "shard_for",
]
