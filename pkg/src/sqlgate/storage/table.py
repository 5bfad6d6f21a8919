"""Sharded in-process table store.

Rows are partitioned by a stable hash of a designated key column modulo
the shard count, so placement is reproducible across runs and processes
(Python's salted ``hash`` is deliberately avoided). Shard contents commit
atomically: readers always see either the pre-ingest or post-ingest row
lists, never a partial batch.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import struct
import threading
from pathlib import Path
from typing import Iterable, Optional

from sqlgate.sql.ast import Column, ColumnType, Schema
from sqlgate.storage.errors import SchemaMismatch, StorageError, UnknownColumn, UnknownTable

SNAPSHOT_MAGIC = b"SGSNAP1\n"

_TYPE_TAGS = {ColumnType.TEXT: b"s", ColumnType.INT: b"i", ColumnType.FLOAT: b"f", ColumnType.DATE: b"d"}


def shard_for(key_value: object, num_shards: int) -> int:
    """Deterministic shard assignment: md5 of the canonical key string."""
    if isinstance(key_value, float):
        canon = b"f:" + repr(key_value).encode("utf-8")
    elif isinstance(key_value, int):
        canon = b"i:" + str(key_value).encode("utf-8")
    else:
        canon = b"s:" + str(key_value).encode("utf-8")
    digest = hashlib.md5(canon).digest()
    return int.from_bytes(digest[:8], "big") % num_shards


def _coerce(value: object, column: Column, row_number: int) -> object:
    if value is None:
        raise SchemaMismatch(row_number, f"null value for column {column.name!r}")
    if column.ctype is ColumnType.INT:
        if isinstance(value, bool):
            raise SchemaMismatch(row_number, f"expected int for {column.name!r}")
        if isinstance(value, int):
            return value
        try:
            return int(str(value).strip())
        except ValueError:
            raise SchemaMismatch(row_number, f"expected int for {column.name!r}, got {value!r}") from None
    if column.ctype is ColumnType.FLOAT:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        try:
            return float(str(value).strip())
        except ValueError:
            raise SchemaMismatch(row_number, f"expected float for {column.name!r}, got {value!r}") from None
    text = value if isinstance(value, str) else None
    if text is None or text == "":
        raise SchemaMismatch(
            row_number, f"expected non-empty text for {column.name!r}, got {value!r}"
        )
    return text


class ShardedTable:
    """One table partitioned into N shards of row tuples."""

    def __init__(self, schema: Schema, name: str, key_column: str, num_shards: int):
        if num_shards < 1:
            raise StorageError("shard count must be >= 1")
        if not schema.has_table(name):
            raise UnknownTable(name)
        self.schema = schema
        self.name = schema.resolve_table(name)
        self.columns = schema.columns(self.name)
        if not schema.has_column(self.name, key_column):
            raise UnknownColumn(key_column, self.name)
        self.key_column = schema.column(self.name, key_column).name
        self.num_shards = num_shards
        self._key_index = [c.name for c in self.columns].index(self.key_column)
        self._shards: list[list[tuple]] = [[] for _ in range(num_shards)]
        self._write_lock = threading.Lock()

    # ------------------------------------------------------------- ingest

    def ingest_rows(self, records: Iterable[dict | list | tuple]) -> int:
        """Type-check, partition, and commit a batch; returns rows ingested.

        Accepts dict records (JSON-lines shape) or positional rows (CSV
        shape). The batch commits atomically after full validation.
        """
        staged: list[list[tuple]] = [[] for _ in range(self.num_shards)]
        count = 0
        for number, record in enumerate(records, start=1):
            row = self._typed_row(record, number)
            staged[shard_for(row[self._key_index], self.num_shards)].append(row)
            count += 1
        with self._write_lock:
            merged = [old + new for old, new in zip(self._shards, staged)]
            self._shards = merged
        return count

    def _typed_row(self, record, row_number: int) -> tuple:
        if isinstance(record, dict):
            lowered = {k.lower(): v for k, v in record.items()}
            unknown = set(lowered) - {c.name.lower() for c in self.columns}
            if unknown:
                raise SchemaMismatch(row_number, f"unknown fields {sorted(unknown)}")
            values = []
            for col in self.columns:
                if col.name.lower() not in lowered:
                    raise SchemaMismatch(row_number, f"missing field {col.name!r}")
                values.append(lowered[col.name.lower()])
        else:
            values = list(record)
            if len(values) != len(self.columns):
                raise SchemaMismatch(
                    row_number,
                    f"expected {len(self.columns)} fields, got {len(values)}",
                )
        return tuple(
            _coerce(value, col, row_number) for value, col in zip(values, self.columns)
        )

    def ingest_csv(self, source: str | Path | io.TextIOBase) -> int:
        """Comma-delimited text with a header row naming the columns."""
        if isinstance(source, (str, Path)):
            with open(source, newline="", encoding="utf-8") as handle:
                return self.ingest_csv(handle)
        reader = csv.reader(source)
        try:
            header = next(reader)
        except StopIteration:
            return 0
        known = {c.name.lower() for c in self.columns}
        for field in header:
            if field.lower() not in known:
                raise UnknownColumn(field, self.name)
        return self.ingest_rows(dict(zip(header, row)) for row in reader)

    def ingest_jsonl(self, source: str | Path | io.TextIOBase) -> int:
        """JSON-lines, one object per row."""
        if isinstance(source, (str, Path)):
            with open(source, encoding="utf-8") as handle:
                return self.ingest_jsonl(handle)
        return self.ingest_rows(
            json.loads(line) for line in source if line.strip()
        )

    # -------------------------------------------------------------- access

    def shard_rows(self, shard_id: int) -> list[tuple]:
        if not 0 <= shard_id < self.num_shards:
            raise StorageError(f"shard {shard_id} out of range")
        return self._shards[shard_id]

    def all_rows(self) -> list[tuple]:
        shards = self._shards
        return [row for shard in shards for row in shard]

    def row_count(self) -> int:
        return sum(len(shard) for shard in self._shards)

    def shard_sizes(self) -> list[int]:
        return [len(shard) for shard in self._shards]

    def column_index(self, name: str) -> int:
        for i, col in enumerate(self.columns):
            if col.name.lower() == name.lower():
                return i
        raise UnknownColumn(name, self.name)

    # ----------------------------------------------------------- snapshots

    def save_snapshots(self, directory: str | Path) -> list[Path]:
        """Write one length-prefixed binary record file per shard."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = []
        for shard_id, rows in enumerate(self._shards):
            path = directory / f"{self.name}.shard{shard_id}.bin"
            with open(path, "wb") as out:
                out.write(SNAPSHOT_MAGIC)
                out.write(struct.pack(">I", len(rows)))
                for row in rows:
                    out.write(struct.pack(">H", len(row)))
                    for value, col in zip(row, self.columns):
                        payload = (
                            repr(value) if col.ctype is ColumnType.FLOAT else str(value)
                        ).encode("utf-8")
                        out.write(_TYPE_TAGS[col.ctype])
                        out.write(struct.pack(">I", len(payload)))
                        out.write(payload)
            paths.append(path)
        return paths

    def load_snapshots(self, directory: str | Path) -> int:
        """Replace shard contents from files written by save_snapshots."""
        directory = Path(directory)
        shards: list[list[tuple]] = []
        for shard_id in range(self.num_shards):
            path = directory / f"{self.name}.shard{shard_id}.bin"
            with open(path, "rb") as handle:
                if handle.read(len(SNAPSHOT_MAGIC)) != SNAPSHOT_MAGIC:
                    raise StorageError(f"{path} is not a shard snapshot")
                (count,) = struct.unpack(">I", handle.read(4))
                rows = []
                for _ in range(count):
                    (arity,) = struct.unpack(">H", handle.read(2))
                    values = []
                    for _ in range(arity):
                        tag = handle.read(1)
                        (size,) = struct.unpack(">I", handle.read(4))
                        text = handle.read(size).decode("utf-8")
                        if tag == b"i":
                            values.append(int(text))
                        elif tag == b"f":
                            values.append(float(text))
                        else:
                            values.append(text)
                    rows.append(tuple(values))
            shards.append(rows)
        with self._write_lock:
            self._shards = shards
        return sum(len(s) for s in shards)


class TableStore:
    """Registry of sharded tables behind one schema."""

    def __init__(self, schema: Schema, num_shards: int = 3):
        self.schema = schema
        self.num_shards = num_shards
        self.tables: dict[str, ShardedTable] = {}

    def create_table(self, name: str, key_column: str, num_shards: Optional[int] = None) -> ShardedTable:
        table = ShardedTable(self.schema, name, key_column, num_shards or self.num_shards)
        self.tables[table.name.lower()] = table
        return table

    def get(self, name: str) -> ShardedTable:
        try:
            return self.tables[name.lower()]
        except KeyError:
            raise UnknownTable(name) from None
