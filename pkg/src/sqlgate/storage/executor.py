"""Query execution: per-shard evaluation plus scatter-gather merge.

Shards evaluate filter + projection (or partial GROUP BY counts) locally;
global ORDER BY and LIMIT belong to the merge. With GROUP BY, shards must
return full partials: a key's global count can exceed any local count, so
per-shard top-k truncation would be wrong (see the pitfall test).

Ordering is deterministic: ORDER BY keys first, remaining ties broken by
the ascending printed form of the group key (aggregates) or of the whole
row (plain selects).
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Union as TUnion

from sqlgate.sql.ast import (
    And,
    Between,
    ColumnProj,
    ColumnRef,
    Comparison,
    CompareOp,
    CountStar,
    Expr,
    InList,
    Like,
    Literal,
    Not,
    Or,
    Select,
    Star,
)
from sqlgate.storage.errors import (
    AllShardsFailed,
    InvalidProjection,
    StorageError,
    TypeMismatch,
    UnknownColumn,
    UnknownTable,
)
from sqlgate.storage.table import ShardedTable


@dataclass
class ResultSet:
    columns: list[str]
    rows: list[tuple]
    ordered: bool = False  # True iff the query carried ORDER BY

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise StorageError("row arity does not match column count")

    def to_text(self) -> str:
        lines = ["\t".join(self.columns)]
        lines.extend("\t".join(_render(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"columns": self.columns, "rows": [list(r) for r in self.rows], "ordered": self.ordered}


@dataclass
class PartialAggregate:
    group_columns: tuple[str, ...]  # () for a global COUNT(*)
    counts: dict[tuple, int] = field(default_factory=dict)

    def __post_init__(self):
        if any(count < 1 for count in self.counts.values()):
            raise StorageError("partial aggregate counts must be >= 1")


def _render(value: object) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _render_key(values: tuple) -> str:
    return "\x1f".join(_render(v) for v in values)


# ----------------------------------------------------------- predicate eval


@lru_cache(maxsize=512)
def _like_matcher(pattern: str):
    regex = "".join(
        ".*" if ch == "%" else "." if ch == "_" else re.escape(ch) for ch in pattern
    )
    return re.compile(regex, re.DOTALL).fullmatch


def _compare(op: CompareOp, left: object, right: object) -> bool:
    l_num = isinstance(left, (int, float))
    r_num = isinstance(right, (int, float))
    if l_num != r_num:
        if op is CompareOp.EQ:
            return False
        if op is CompareOp.NE:
            return True
        raise TypeMismatch(
            f"cannot order {type(left).__name__} against {type(right).__name__}"
        )
    if op is CompareOp.EQ:
        return left == right
    if op is CompareOp.NE:
        return left != right
    if op is CompareOp.LT:
        return left < right
    if op is CompareOp.LE:
        return left <= right
    if op is CompareOp.GT:
        return left > right
    return left >= right


class _RowFilter:
    def __init__(self, table: ShardedTable, expr: Optional[Expr]):
        self.table = table
        self.expr = expr
        self._indices: dict[str, int] = {}

    def _value(self, node: Expr, row: tuple) -> object:
        if isinstance(node, ColumnRef):
            key = node.name.lower()
            if key not in self._indices:
                self._indices[key] = self.table.column_index(node.name)
            return row[self._indices[key]]
        if isinstance(node, Literal):
            return node.value
        raise StorageError(f"not a value expression: {node!r}")

    def matches(self, row: tuple) -> bool:
        return self.expr is None or self._eval(self.expr, row)

    def _eval(self, expr: Expr, row: tuple) -> bool:
        if isinstance(expr, And):
            return all(self._eval(item, row) for item in expr.items)
        if isinstance(expr, Or):
            return any(self._eval(item, row) for item in expr.items)
        if isinstance(expr, Not):
            return not self._eval(expr.operand, row)
        if isinstance(expr, Comparison):
            return _compare(expr.op, self._value(expr.left, row), self._value(expr.right, row))
        if isinstance(expr, Like):
            value = self._value(expr.operand, row)
            if not isinstance(value, str):
                raise TypeMismatch("LIKE requires a text operand")
            return _like_matcher(expr.pattern.value)(value) is not None
        if isinstance(expr, InList):
            value = self._value(expr.operand, row)
            return any(_compare(CompareOp.EQ, value, item.value) for item in expr.items)
        if isinstance(expr, Between):
            value = self._value(expr.operand, row)
            low = self._value(expr.low, row)
            high = self._value(expr.high, row)
            return _compare(CompareOp.GE, value, low) and _compare(CompareOp.LE, value, high)
        raise StorageError(f"not a predicate: {expr!r}")


# ------------------------------------------------------------ shard execute


def _is_aggregate(stmt: Select) -> bool:
    return bool(stmt.group_by) or any(isinstance(it, CountStar) for it in stmt.items)


def _check_table(stmt: Select, table: ShardedTable) -> None:
    if stmt.table.lower() != table.name.lower():
        raise UnknownTable(stmt.table)


def _group_plan(stmt: Select, table: ShardedTable) -> list[int]:
    """Indices of the group-by columns; validates the projection shape."""
    allowed = {name.lower() for name in stmt.group_by}
    for item in stmt.items:
        if isinstance(item, Star):
            raise InvalidProjection("* cannot be combined with GROUP BY")
        if isinstance(item, ColumnProj) and item.name.lower() not in allowed:
            raise InvalidProjection(
                f"column {item.name!r} is not a group-by key"
            )
    return [table.column_index(name) for name in stmt.group_by]


def _validate_columns(expr: Expr, table: ShardedTable) -> None:
    """Static check: every column the predicate references must exist.

    Keeps error behavior identical across shard layouts (an empty shard
    must fail the same way a populated one does)."""
    if isinstance(expr, ColumnRef):
        table.column_index(expr.name)
    elif isinstance(expr, (And, Or)):
        for item in expr.items:
            _validate_columns(item, table)
    elif isinstance(expr, Not):
        _validate_columns(expr.operand, table)
    elif isinstance(expr, Comparison):
        _validate_columns(expr.left, table)
        _validate_columns(expr.right, table)
    elif isinstance(expr, (Like, InList)):
        _validate_columns(expr.operand, table)
    elif isinstance(expr, Between):
        _validate_columns(expr.operand, table)
        _validate_columns(expr.low, table)
        _validate_columns(expr.high, table)


def execute_local(stmt: Select, table: ShardedTable, shard_id: int) -> TUnion[ResultSet, PartialAggregate]:
    """Evaluate one shard: filter, then partial-aggregate or project.

    Non-grouped results intentionally omit global ORDER BY/LIMIT; those are
    applied by the merge.
    """
    validate_statement(stmt, table)
    rows = table.shard_rows(shard_id)
    predicate = _RowFilter(table, stmt.where)
    matched = [row for row in rows if predicate.matches(row)]

    if _is_aggregate(stmt):
        if stmt.group_by:
            key_indices = _group_plan(stmt, table)
            counts: dict[tuple, int] = {}
            for row in matched:
                key = tuple(row[i] for i in key_indices)
                counts[key] = counts.get(key, 0) + 1
            return PartialAggregate(tuple(table.columns[i].name for i in key_indices), counts)
        if any(isinstance(it, ColumnProj) for it in stmt.items) or any(
            isinstance(it, Star) for it in stmt.items
        ):
            raise InvalidProjection("plain columns beside COUNT(*) require GROUP BY")
        counts = {(): len(matched)} if matched else {}
        return PartialAggregate((), counts)

    indices = _projection_indices(stmt, table)
    projected = [tuple(row[i] for i in indices) for row in matched]
    return ResultSet(_projection_labels(stmt, table), projected, ordered=False)


def _projection_indices(stmt: Select, table: ShardedTable) -> list[int]:
    if stmt.has_star():
        return list(range(len(table.columns)))
    return [table.column_index(item.name) for item in stmt.items]


def _projection_labels(stmt: Select, table: ShardedTable) -> list[str]:
    if stmt.has_star():
        return [col.name for col in table.columns]
    labels = []
    for item in stmt.items:
        if isinstance(item, ColumnProj):
            labels.append(item.alias or item.name)
        elif isinstance(item, CountStar):
            labels.append(item.alias or "count(*)")
    return labels


# -------------------------------------------------------------------- merge


def merge_partials(parts: list[PartialAggregate], stmt: Select) -> ResultSet:
    """Sum per-key counts, then apply global ORDER BY and LIMIT."""
    if not parts:
        return ResultSet(_agg_labels(stmt), [], ordered=bool(stmt.order_by))
    totals: dict[tuple, int] = {}
    for part in parts:
        for key, count in part.counts.items():
            totals[key] = totals.get(key, 0) + count

    if not stmt.group_by:  # global COUNT(*): always exactly one row
        total = totals.get((), 0)
        rows = [(total,) * sum(1 for it in stmt.items if isinstance(it, CountStar))]
        return ResultSet(_agg_labels(stmt), rows, ordered=False)

    pairs = sorted(totals.items(), key=lambda kv: _render_key(kv[0]))  # tie-break
    for order in reversed(stmt.order_by):
        key_fn = _agg_order_key(order.key, stmt)
        pairs.sort(key=lambda kv: key_fn(kv), reverse=order.descending)
    if stmt.limit is not None:
        pairs = pairs[: stmt.limit]

    group_pos = {name.lower(): i for i, name in enumerate(stmt.group_by)}
    rows = []
    for key, count in pairs:
        row = []
        for item in stmt.items:
            if isinstance(item, CountStar):
                row.append(count)
            else:
                row.append(key[group_pos[item.name.lower()]])
        rows.append(tuple(row))
    return ResultSet(_agg_labels(stmt), rows, ordered=bool(stmt.order_by))


def _agg_labels(stmt: Select) -> list[str]:
    labels = []
    for item in stmt.items:
        if isinstance(item, CountStar):
            labels.append(item.alias or "count(*)")
        elif isinstance(item, ColumnProj):
            labels.append(item.alias or item.name)
    return labels


def _agg_order_key(key: str, stmt: Select):
    lowered = key.lower()
    for item in stmt.items:
        if isinstance(item, CountStar) and item.alias and item.alias.lower() == lowered:
            return lambda kv: kv[1]
    if lowered in ("count(*)",):
        return lambda kv: kv[1]
    for i, name in enumerate(stmt.group_by):
        if name.lower() == lowered:
            return lambda kv, i=i: kv[0][i]
    for item in stmt.items:
        if isinstance(item, ColumnProj) and item.alias and item.alias.lower() == lowered:
            for i, name in enumerate(stmt.group_by):
                if name.lower() == item.name.lower():
                    return lambda kv, i=i: kv[0][i]
    raise UnknownColumn(key, stmt.table)


def merge_rows(parts: list[ResultSet], stmt: Select, table: ShardedTable) -> ResultSet:
    """Concatenate shard rows, then apply global ORDER BY and LIMIT."""
    labels = _projection_labels(stmt, table)
    rows: list[tuple] = []
    for part in parts:
        rows.extend(part.rows)
    if stmt.order_by:
        rows.sort(key=_render_key)  # deterministic tie-break
        positions = _order_positions(stmt, labels)
        for order in reversed(stmt.order_by):
            pos = positions.get(order.key.lower())
            if pos is None:
                raise UnknownColumn(order.key, stmt.table)
            rows.sort(key=lambda row, pos=pos: row[pos], reverse=order.descending)
    elif stmt.limit is not None:
        # LIMIT without ORDER BY: cut along a canonical row order so the
        # kept subset does not depend on the shard layout
        rows.sort(key=_render_key)
    if stmt.limit is not None:
        rows = rows[: stmt.limit]
    return ResultSet(labels, rows, ordered=bool(stmt.order_by))


def _order_positions(stmt: Select, labels: list[str]) -> dict[str, int]:
    if stmt.has_star():
        return {label.lower(): i for i, label in enumerate(labels)}
    positions: dict[str, int] = {}
    for i, item in enumerate(stmt.items):
        if isinstance(item, ColumnProj):
            if item.alias:
                positions.setdefault(item.alias.lower(), i)
            positions.setdefault(item.name.lower(), i)
    return positions


# -------------------------------------------------------------- distributed


class ShardWorker:
    """One shard behind the node-protocol shape: ``health()`` mirrors
    GET /health, ``execute()`` answers with a JSON-ready payload. Keeping
    the scatter on this interface lets a shard move out-of-process (HTTP
    worker) without touching the merge."""

    def __init__(self, table: ShardedTable, shard_id: int):
        self.table = table
        self.shard_id = shard_id

    @property
    def address(self) -> str:
        return f"local:shard/{self.shard_id}"

    def health(self) -> dict:
        return {"status": "ok", "rows": len(self.table.shard_rows(self.shard_id))}

    def execute(self, stmt: Select) -> dict:
        outcome = execute_local(stmt, self.table, self.shard_id)
        if isinstance(outcome, PartialAggregate):
            return {
                "kind": "partial",
                "group_columns": list(outcome.group_columns),
                "counts": [[list(key), count] for key, count in outcome.counts.items()],
            }
        return {"kind": "rows", "columns": outcome.columns, "rows": [list(r) for r in outcome.rows]}


def decode_worker_payload(payload: dict) -> TUnion[ResultSet, PartialAggregate]:
    if payload["kind"] == "partial":
        return PartialAggregate(
            tuple(payload["group_columns"]),
            {tuple(key): count for key, count in payload["counts"]},
        )
    return ResultSet(payload["columns"], [tuple(row) for row in payload["rows"]])


def validate_statement(stmt: Select, table: ShardedTable) -> None:
    """Static checks shared by local and distributed execution: table and
    column existence, projection shape, order-key resolvability."""
    _check_table(stmt, table)
    if stmt.where is not None:
        _validate_columns(stmt.where, table)
    if _is_aggregate(stmt):
        if stmt.group_by:
            _group_plan(stmt, table)
            for order in stmt.order_by:
                _agg_order_key(order.key, stmt)
        elif any(isinstance(it, (ColumnProj, Star)) for it in stmt.items):
            raise InvalidProjection("plain columns beside COUNT(*) require GROUP BY")
    else:
        _projection_indices(stmt, table)
        positions = _order_positions(stmt, _projection_labels(stmt, table))
        for order in stmt.order_by:
            if order.key.lower() not in positions:
                raise UnknownColumn(order.key, stmt.table)


def execute_distributed(
    stmt: Select, table: ShardedTable, max_workers: Optional[int] = None
) -> ResultSet:
    """Scatter execute_local across all shards concurrently, gather, merge.

    Statement-level faults (unknown table/column, bad projection) raise
    before the scatter. For row-evaluation faults, the first failing
    shard's error (by shard index) propagates; if every shard failed,
    AllShardsFailed is raised instead.
    """
    if not isinstance(stmt, Select):
        raise StorageError("only SELECT statements are executable")
    validate_statement(stmt, table)
    shard_workers = [ShardWorker(table, shard_id) for shard_id in range(table.num_shards)]
    outcomes: list[TUnion[ResultSet, PartialAggregate, Exception]] = [None] * table.num_shards

    def run(worker: ShardWorker):
        try:
            return decode_worker_payload(worker.execute(stmt))
        except Exception as exc:  # gathered and re-raised in shard order
            return exc

    pool_size = max_workers or min(table.num_shards, 8)
    with ThreadPoolExecutor(max_workers=pool_size) as pool:
        for shard_id, outcome in enumerate(pool.map(run, shard_workers)):
            outcomes[shard_id] = outcome

    errors = [o for o in outcomes if isinstance(o, Exception)]
    if errors:
        if len(errors) == table.num_shards:
            raise AllShardsFailed(errors[0], table.num_shards)
        raise errors[0]

    if _is_aggregate(stmt):
        return merge_partials(outcomes, stmt)
    return merge_rows(outcomes, stmt, table)
