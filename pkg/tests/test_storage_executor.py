import random

import pytest

from sqlgate.sql import parse
from sqlgate.sql.ast import Column, ColumnType, Schema
from sqlgate.sql.fuzz import random_data_select
from sqlgate.storage import (
    AllShardsFailed,
    InvalidProjection,
    PartialAggregate,
    ResultSet,
    ShardedTable,
    TypeMismatch,
    UnknownColumn,
    execute_distributed,
    execute_local,
    merge_partials,
)


def fill(table, rows):
    table.ingest_rows(rows)
    return table


@pytest.fixture
def small(tiny_schema):
    rows = [
        {"id": "r1", "assignee": "Intel", "cpc": "A", "n": 1},
        {"id": "r2", "assignee": "AMD", "cpc": "A", "n": 2},
        {"id": "r3", "assignee": "Intel", "cpc": "B", "n": 3},
        {"id": "r4", "assignee": "IBM", "cpc": "A", "n": 4},
        {"id": "r5", "assignee": "Intel", "cpc": "C", "n": 5},
    ]
    return fill(ShardedTable(tiny_schema, "t", "id", 3), rows)


def hits(result):
    return sorted(result.rows)


def test_like_filter_on_single_shard(tiny_schema):
    table = fill(
        ShardedTable(tiny_schema, "t", "id", 1),
        [
            {"id": "a", "assignee": "Intel", "cpc": "x", "n": 1},
            {"id": "b", "assignee": "AMD", "cpc": "x", "n": 2},
            {"id": "c", "assignee": "Intel", "cpc": "x", "n": 3},
        ],
    )
    stmt = parse("SELECT id FROM t WHERE assignee LIKE '%Intel%'")
    result = execute_local(stmt, table, 0)
    assert isinstance(result, ResultSet)
    assert hits(result) == [("a",), ("c",)]


def test_group_by_emits_partial_aggregate(tiny_schema):
    table = fill(
        ShardedTable(tiny_schema, "t", "id", 1),
        [
            {"id": "a", "assignee": "x", "cpc": "A", "n": 1},
            {"id": "b", "assignee": "x", "cpc": "A", "n": 2},
            {"id": "c", "assignee": "x", "cpc": "B", "n": 3},
        ],
    )
    stmt = parse("SELECT cpc, COUNT(*) FROM t GROUP BY cpc")
    part = execute_local(stmt, table, 0)
    assert isinstance(part, PartialAggregate)
    assert part.counts == {("A",): 2, ("B",): 1}


def test_missing_column_raises_even_on_empty_shard(tiny_schema):
    table = ShardedTable(tiny_schema, "t", "id", 2)
    stmt = parse("SELECT id FROM t WHERE missing = 1")
    with pytest.raises(UnknownColumn):
        execute_local(stmt, table, 0)


def test_merge_sums_orders_limits():
    stmt = parse("SELECT cpc, COUNT(*) AS count FROM t GROUP BY cpc ORDER BY count DESC LIMIT 1")
    parts = [
        PartialAggregate(("cpc",), {("A",): 2, ("B",): 1}),
        PartialAggregate(("cpc",), {("A",): 1}),
    ]
    merged = merge_partials(parts, stmt)
    assert merged.rows == [("A", 3)]
    assert merged.ordered


def test_merge_zero_parts_is_empty():
    stmt = parse("SELECT cpc, COUNT(*) AS count FROM t GROUP BY cpc")
    merged = merge_partials([], stmt)
    assert merged.rows == []
    assert merged.columns == ["cpc", "count"]


def test_merge_tie_break_is_ascending_key():
    stmt = parse("SELECT cpc, COUNT(*) AS c FROM t GROUP BY cpc ORDER BY c DESC")
    parts = [PartialAggregate(("cpc",), {("B",): 2, ("A",): 2, ("C",): 5})]
    merged = merge_partials(parts, stmt)
    assert merged.rows == [("C", 5), ("A", 2), ("B", 2)]


def test_global_count_without_group(small):
    stmt = parse("SELECT COUNT(*) FROM t WHERE assignee = 'Intel'")
    result = execute_distributed(stmt, small)
    assert result.rows == [(3,)]
    none = execute_distributed(parse("SELECT COUNT(*) FROM t WHERE assignee = 'nobody'"), small)
    assert none.rows == [(0,)]


def test_distributed_matches_paper_shape(small):
    stmt = parse(
        "SELECT cpc, COUNT(*) AS count FROM t WHERE assignee LIKE '%Intel%' "
        "GROUP BY cpc ORDER BY count DESC LIMIT 10"
    )
    result = execute_distributed(stmt, small)
    assert result.rows == [("A", 1), ("B", 1), ("C", 1)]


def test_group_pretruncation_pitfall(tiny_schema):
    # Key B is never a local winner yet wins globally; shards must ship
    # full partials for the merged top-1 to be right.
    rows = []
    rows += [{"id": f"a{i}", "assignee": "x", "cpc": "A", "n": i} for i in range(3)]
    rows += [{"id": f"c{i}", "assignee": "x", "cpc": "C", "n": i} for i in range(3)]
    rows += [{"id": f"b{i}", "assignee": "x", "cpc": "B", "n": i} for i in range(4)]
    sharded = fill(ShardedTable(tiny_schema, "t", "id", 3), rows)
    single = fill(ShardedTable(tiny_schema, "t", "id", 1), rows)
    stmt = parse("SELECT cpc, COUNT(*) AS c FROM t GROUP BY cpc ORDER BY c DESC LIMIT 1")
    top_sharded = execute_distributed(stmt, sharded)
    top_single = execute_distributed(stmt, single)
    assert top_sharded.rows == top_single.rows == [("B", 4)]

    local_winners = set()
    for shard in range(3):
        part = execute_local(parse("SELECT cpc, COUNT(*) AS c FROM t GROUP BY cpc"), sharded, shard)
        if part.counts:
            best = max(part.counts.items(), key=lambda kv: (kv[1], kv[0]))
            local_winners.add(best[0][0])
    # if any shard's local top-1 already equals B on every shard the pitfall
    # would be invisible; assert the scenario actually exercises it
    assert local_winners != {"B"}


def test_type_mismatch_comparison(small):
    stmt = parse("SELECT id FROM t WHERE n < 'abc'")
    with pytest.raises(TypeMismatch):
        execute_local(stmt, small, 0)


def test_partial_failure_propagates_first_error(tiny_schema):
    # Only the shard holding the poison row evaluates the bad comparison.
    rows = [{"id": f"k{i}", "assignee": "a", "cpc": "c", "n": 1} for i in range(12)]
    rows.append({"id": "poison", "assignee": "a", "cpc": "c", "n": 2})
    table = fill(ShardedTable(tiny_schema, "t", "id", 3), rows)
    stmt = parse("SELECT id FROM t WHERE n = 1 OR cpc < 5")
    with pytest.raises(TypeMismatch):
        execute_distributed(stmt, table)


def test_eq_between_types_is_false_not_error(small):
    stmt = parse("SELECT id FROM t WHERE n = 'abc'")
    assert execute_distributed(stmt, small).rows == []
    stmt = parse("SELECT id FROM t WHERE assignee != 5 AND id = 'r1'")
    assert execute_distributed(stmt, small).rows == [("r1",)]


def test_order_by_and_limit_applied_at_merge(small):
    stmt = parse("SELECT id, n FROM t ORDER BY n DESC LIMIT 2")
    result = execute_distributed(stmt, small)
    assert result.rows == [("r5", 5), ("r4", 4)]
    assert result.ordered


def test_order_by_alias(small):
    stmt = parse("SELECT id AS pid, n AS score FROM t ORDER BY score DESC LIMIT 1")
    result = execute_distributed(stmt, small)
    assert result.columns == ["pid", "score"]
    assert result.rows == [("r5", 5)]


def test_star_projection_and_order(small):
    stmt = parse("SELECT * FROM t WHERE cpc = 'A' ORDER BY n ASC")
    result = execute_distributed(stmt, small)
    assert [r[0] for r in result.rows] == ["r1", "r2", "r4"]
    assert result.columns == ["id", "assignee", "cpc", "n"]


def test_limit_zero(small):
    stmt = parse("SELECT id FROM t LIMIT 0")
    assert execute_distributed(stmt, small).rows == []


def test_star_with_group_by_rejected(small):
    stmt = parse("SELECT * FROM t GROUP BY cpc")
    with pytest.raises(InvalidProjection):
        execute_distributed(stmt, small)


def test_mixed_projection_without_group_rejected(small):
    stmt = parse("SELECT cpc, COUNT(*) FROM t")
    with pytest.raises(InvalidProjection):
        execute_distributed(stmt, small)


def test_unknown_column_raised_before_scatter(small):
    with pytest.raises(UnknownColumn):
        execute_distributed(parse("SELECT nope FROM t"), small)
    with pytest.raises(UnknownColumn):
        execute_distributed(parse("SELECT id FROM t ORDER BY ghost"), small)


def test_all_shards_failed_distinct(small):
    # every shard holds rows, so the bad comparison fails on all of them
    stmt = parse("SELECT id FROM t WHERE cpc < 5")
    with pytest.raises(AllShardsFailed) as exc:
        execute_distributed(stmt, small)
    assert isinstance(exc.value.first, TypeMismatch)


def test_shard_worker_speaks_node_protocol_shape(small):
    from sqlgate.storage import ShardWorker, decode_worker_payload
    import json

    worker = ShardWorker(small, 0)
    assert worker.health()["status"] == "ok"
    payload = worker.execute(parse("SELECT cpc, COUNT(*) FROM t GROUP BY cpc"))
    json.dumps(payload)  # wire-ready: must serialize as-is
    assert payload["kind"] == "partial"
    decoded = decode_worker_payload(payload)
    assert isinstance(decoded, PartialAggregate)

    rows_payload = worker.execute(parse("SELECT id FROM t"))
    json.dumps(rows_payload)
    assert rows_payload["kind"] == "rows"
    assert decode_worker_payload(rows_payload).columns == ["id"]


def test_deterministic_printing(small):
    stmt = parse("SELECT cpc, COUNT(*) AS c FROM t GROUP BY cpc ORDER BY c DESC")
    first = execute_distributed(stmt, small).to_text()
    second = execute_distributed(stmt, small).to_text()
    assert first == second


def sorted_or_exact(result, ordered):
    return result.rows if ordered else sorted(result.rows)


def test_oracle_equivalence_small():
    rng = random.Random(777)
    schema = Schema(
        {
            "t": [
                Column("id", ColumnType.TEXT),
                Column("grp", ColumnType.TEXT),
                Column("score", ColumnType.INT),
                Column("when_", ColumnType.DATE),
            ]
        }
    )
    rows = [
        {
            "id": f"row{i}",
            "grp": rng.choice("abcde"),
            "score": rng.randint(0, 30),
            "when_": f"20{rng.randint(10, 25)}-01-01",
        }
        for i in range(200)
    ]
    pools = {
        "id": [r["id"] for r in rows[:20]],
        "grp": list("abcde"),
        "score": list(range(0, 31)),
        "when_": sorted({r["when_"] for r in rows}),
    }
    tables = {}
    for n in (1, 2, 3, 5):
        tables[n] = fill(ShardedTable(schema, "t", "id", n), rows)
    for i in range(60):
        stmt = random_data_select(rng, schema, "t", pools)
        baseline = execute_distributed(stmt, tables[1])
        for n in (2, 3, 5):
            result = execute_distributed(stmt, tables[n])
            assert sorted_or_exact(result, result.ordered) == sorted_or_exact(
                baseline, baseline.ordered
            ), f"case {i} shards={n}"
