from __future__ import annotations

from sqlgate.errors import SqlgateError


class StorageError(SqlgateError):
    pass


class UnknownTable(StorageError):
    def __init__(self, name: str):
        super().__init__(f"unknown table {name!r}")
        self.table = name


class UnknownColumn(StorageError):
    def __init__(self, name: str, table: str):
        super().__init__(f"unknown column {name!r} in table {table!r}")
        self.column = name
        self.table = table


class SchemaMismatch(StorageError):
    def __init__(self, row_number: int, detail: str):
        super().__init__(f"row {row_number}: {detail}")
        self.row_number = row_number


class TypeMismatch(StorageError):
    """Comparison between incompatible value types inside a predicate."""


class InvalidProjection(StorageError):
    """Projection shape the executor cannot evaluate (e.g. * with GROUP BY)."""


class AllShardsFailed(StorageError):
    def __init__(self, first: Exception, count: int):
        super().__init__(f"all {count} shards failed; first error: {first}")
        self.first = first
