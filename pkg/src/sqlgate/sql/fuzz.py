"""Seeded random statement generation.

Two generators: ``random_statement`` draws from the whole grammar (for
round-trip and normalization properties), ``random_data_select`` draws
executable SELECTs against a concrete schema and value pools (for the
distributed-vs-single-node equivalence harness).
"""

from __future__ import annotations

import random
import string
from typing import Sequence

from sqlgate.sql.ast import (
    And,
    Between,
    ColumnProj,
    ColumnRef,
    ColumnType,
    Comparison,
    CompareOp,
    CountStar,
    Delete,
    Drop,
    Expr,
    InList,
    Insert,
    Like,
    Literal,
    Not,
    Or,
    OrderItem,
    Schema,
    Select,
    Stacked,
    Star,
    Statement,
    UnionSelect,
    Update,
)

_IDENTS = [
    "alpha", "bravo", "Charlie", "delta", "Echo", "foxtrot", "golf",
    "hotel", "india", "juliet", "kilo", "lima_2", "mike", "t1", "widgets",
]

_STRING_ALPHABET = string.ascii_letters + string.digits + " %_'-.:/é漢"


def _ident(rng: random.Random) -> str:
    return rng.choice(_IDENTS)


def _string_value(rng: random.Random) -> str:
    return "".join(rng.choice(_STRING_ALPHABET) for _ in range(rng.randint(0, 12)))


def _literal(rng: random.Random) -> Literal:
    kind = rng.randrange(4)
    if kind == 0:
        return Literal.string(_string_value(rng))
    if kind == 1:
        return Literal.int_(rng.randint(-9999, 9999))
    if kind == 2:
        return Literal.float_(round(rng.uniform(-1000, 1000), rng.randint(0, 6)))
    return Literal.string(f"{rng.randint(1990, 2030)}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}")


def _term(rng: random.Random) -> Expr:
    return ColumnRef(_ident(rng)) if rng.random() < 0.5 else _literal(rng)


def random_expr(rng: random.Random, depth: int = 3) -> Expr:
    if depth <= 0:
        return _predicate(rng)
    roll = rng.random()
    if roll < 0.25:
        items = _bool_items(rng, depth, And)
        return And(tuple(items))
    if roll < 0.5:
        items = _bool_items(rng, depth, Or)
        return Or(tuple(items))
    if roll < 0.6:
        return Not(random_expr(rng, depth - 1))
    return _predicate(rng)


def _bool_items(rng: random.Random, depth: int, cls) -> list[Expr]:
    items: list[Expr] = []
    for _ in range(rng.randint(2, 3)):
        item = random_expr(rng, depth - 1)
        if isinstance(item, cls):  # keep operand lists flat (type invariant)
            items.extend(item.items)
        else:
            items.append(item)
    return items


def _predicate(rng: random.Random) -> Expr:
    roll = rng.randrange(4)
    if roll == 0:
        op = rng.choice(list(CompareOp))
        return Comparison(op, _term(rng), _term(rng))
    if roll == 1:
        pattern = "%" + _string_value(rng) + rng.choice(["%", "_", ""])
        return Like(ColumnRef(_ident(rng)), Literal.string(pattern))
    if roll == 2:
        items = tuple(_literal(rng) for _ in range(rng.randint(1, 4)))
        return InList(ColumnRef(_ident(rng)), items)
    low, high = _literal(rng), _literal(rng)
    return Between(ColumnRef(_ident(rng)), low, high)


def random_select(rng: random.Random, allow_order_limit: bool = True) -> Select:
    grouped = rng.random() < 0.35
    star = not grouped and rng.random() < 0.2
    items: list = []
    aliases: list[str] = []
    plain_cols: list[str] = []
    if star:
        items = [Star()]
    else:
        for _ in range(rng.randint(1, 3)):
            name = _ident(rng)
            alias = _ident(rng) if rng.random() < 0.3 else None
            items.append(ColumnProj(name, alias=alias))
            plain_cols.append(name)
            if alias:
                aliases.append(alias)
        if grouped or rng.random() < 0.3:
            alias = "count" if rng.random() < 0.5 else None
            items.append(CountStar(alias=alias))
            if alias:
                aliases.append(alias)
    group_by: tuple[str, ...] = ()
    if grouped:
        group_by = tuple(dict.fromkeys(plain_cols))  # group on the projected columns
    order_by: list[OrderItem] = []
    if allow_order_limit and rng.random() < 0.5:
        if group_by:
            pool = list(group_by) + aliases + plain_cols
        elif star:
            pool = [_ident(rng)]
        else:
            pool = plain_cols + aliases
        for key in rng.sample(pool, k=min(len(pool), rng.randint(1, 2))):
            order_by.append(OrderItem(key, descending=rng.random() < 0.5))
    limit = rng.randint(0, 50) if allow_order_limit and rng.random() < 0.4 else None
    where = random_expr(rng, depth=rng.randint(0, 3)) if rng.random() < 0.7 else None
    return Select(
        tuple(items),
        _ident(rng),
        where=where,
        group_by=group_by,
        order_by=tuple(order_by),
        limit=limit,
    )


def random_statement(rng: random.Random) -> Statement:
    roll = rng.random()
    if roll < 0.55:
        return random_select(rng)
    if roll < 0.65:
        selects = [random_select(rng, allow_order_limit=False) for _ in range(rng.randint(1, 2))]
        selects.append(random_select(rng))
        return UnionSelect(tuple(selects))
    if roll < 0.73:
        cols = tuple(dict.fromkeys(_ident(rng) for _ in range(rng.randint(1, 3))))
        rows = tuple(
            tuple(_literal(rng) for _ in cols) for _ in range(rng.randint(1, 2))
        )
        return Insert(_ident(rng), cols if rng.random() < 0.7 else None, rows)
    if roll < 0.81:
        assignments = tuple(
            (_ident(rng), _literal(rng)) for _ in range(rng.randint(1, 2))
        )
        where = random_expr(rng, 2) if rng.random() < 0.7 else None
        return Update(_ident(rng), assignments, where=where)
    if roll < 0.87:
        where = random_expr(rng, 2) if rng.random() < 0.7 else None
        return Delete(_ident(rng), where=where)
    if roll < 0.92:
        return Drop(_ident(rng))
    parts: list[Statement] = []
    for _ in range(rng.randint(2, 3)):
        inner = rng.random()
        if inner < 0.6:
            parts.append(random_select(rng))
        elif inner < 0.8:
            parts.append(Delete(_ident(rng), where=random_expr(rng, 1)))
        else:
            parts.append(Drop(_ident(rng)))
    return Stacked(tuple(parts))


# ------------------------------------------------------- executable queries


def random_data_select(
    rng: random.Random,
    schema: Schema,
    table: str,
    value_pools: dict[str, Sequence[object]],
) -> Select:
    """A supported SELECT over ``table`` with filters drawn from real values.

    value_pools maps column name -> sample of values present in the data so
    predicates are selective rather than vacuous.
    """
    columns = schema.columns(table)
    names = [c.name for c in columns]
    where = _data_expr(rng, columns, value_pools, depth=rng.randint(0, 2)) if rng.random() < 0.8 else None
    shape = rng.randrange(3)
    if shape == 0:  # grouped count
        group = rng.choice(names)
        items = (ColumnProj(group), CountStar(alias="cnt"))
        order_pool = [group, "cnt"]
        order_by = tuple(
            OrderItem(key, descending=rng.random() < 0.6)
            for key in rng.sample(order_pool, k=rng.randint(0, 2))
        )
        limit = rng.choice([None, 1, 3, 5, 10])
        return Select(items, table, where=where, group_by=(group,), order_by=order_by, limit=limit)
    if shape == 1:  # global count
        return Select((CountStar(),), table, where=where)
    projected = rng.sample(names, k=rng.randint(1, len(names)))
    items = tuple(ColumnProj(name) for name in projected)
    order_by = tuple(
        OrderItem(key, descending=rng.random() < 0.5)
        for key in rng.sample(projected, k=rng.randint(0, min(2, len(projected))))
    )
    limit = rng.choice([None, None, 0, 2, 7, 25])
    return Select(items, table, where=where, order_by=order_by, limit=limit)


def _data_expr(rng, columns, pools, depth: int) -> Expr:
    if depth > 0 and rng.random() < 0.5:
        cls = And if rng.random() < 0.6 else Or
        items = []
        for _ in range(2):
            item = _data_expr(rng, columns, pools, depth - 1)
            if isinstance(item, cls):
                items.extend(item.items)
            else:
                items.append(item)
        return cls(tuple(items))
    if depth > 0 and rng.random() < 0.15:
        return Not(_data_expr(rng, columns, pools, depth - 1))
    col = rng.choice(list(columns))
    pool = list(pools.get(col.name, []))
    if not pool:
        return Comparison(CompareOp.GE, ColumnRef(col.name), _typed_literal(col.ctype, rng))
    value = rng.choice(pool)
    ref = ColumnRef(col.name)
    if col.ctype is ColumnType.TEXT or col.ctype is ColumnType.DATE:
        roll = rng.randrange(4)
        if roll == 0 and col.ctype is ColumnType.TEXT:
            inner = str(value)
            frag = inner[: rng.randint(1, max(1, len(inner)))] if inner else ""
            return Like(ref, Literal.string(f"%{frag}%"))
        if roll == 1:
            op = rng.choice([CompareOp.GE, CompareOp.LE, CompareOp.GT, CompareOp.LT])
            return Comparison(op, ref, Literal.string(str(value)))
        if roll == 2:
            items = tuple(Literal.string(str(v)) for v in rng.sample(pool, k=min(len(pool), rng.randint(1, 3))))
            return InList(ref, items)
        return Comparison(
            rng.choice([CompareOp.EQ, CompareOp.NE]), ref, Literal.string(str(value))
        )
    # numeric columns
    make = Literal.int_ if col.ctype is ColumnType.INT else Literal.float_
    roll = rng.randrange(3)
    if roll == 0:
        lo, hi = sorted(rng.sample(pool, k=2)) if len(pool) >= 2 else (value, value)
        return Between(ref, make(lo), make(hi))
    if roll == 1:
        items = tuple(make(v) for v in rng.sample(pool, k=min(len(pool), rng.randint(1, 3))))
        return InList(ref, items)
    op = rng.choice(list(CompareOp))
    return Comparison(op, ref, make(value))


def _typed_literal(ctype: ColumnType, rng: random.Random) -> Literal:
    if ctype is ColumnType.INT:
        return Literal.int_(rng.randint(0, 100))
    if ctype is ColumnType.FLOAT:
        return Literal.float_(round(rng.uniform(0, 100), 3))
    if ctype is ColumnType.DATE:
        return Literal.string(f"{rng.randint(1995, 2025)}-01-01")
    return Literal.string(_string_value(rng))
