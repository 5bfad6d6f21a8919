"""Canonical form for statement comparison (exact-match scoring).

Identifiers fold to lowercase, AND/OR operand lists sort by printed form,
spans are dropped. Printing a normalized statement yields lowercase
keywords and single-quoted literals, so two statements are normalized-equal
iff their canonical prints coincide. Idempotent by construction.
"""

from __future__ import annotations

from sqlgate.sql.ast import (
    And,
    Between,
    ColumnProj,
    ColumnRef,
    Comparison,
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
    Select,
    Stacked,
    Star,
    Statement,
    UnionSelect,
    Update,
)
from sqlgate.sql.printer import print_expr


def normalize(stmt: Statement) -> Statement:
    if isinstance(stmt, Select):
        return _select(stmt)
    if isinstance(stmt, UnionSelect):
        return UnionSelect(tuple(_select(sel) for sel in stmt.selects))
    if isinstance(stmt, Stacked):
        return Stacked(tuple(normalize(part) for part in stmt.parts))
    if isinstance(stmt, Insert):
        columns = tuple(c.lower() for c in stmt.columns) if stmt.columns else None
        rows = tuple(tuple(_literal(v) for v in row) for row in stmt.rows)
        return Insert(stmt.table.lower(), columns, rows)
    if isinstance(stmt, Update):
        assignments = tuple(
            (name.lower(), _literal(value)) for name, value in stmt.assignments
        )
        where = normalize_expr(stmt.where) if stmt.where is not None else None
        return Update(stmt.table.lower(), assignments, where=where)
    if isinstance(stmt, Delete):
        where = normalize_expr(stmt.where) if stmt.where is not None else None
        return Delete(stmt.table.lower(), where=where)
    if isinstance(stmt, Drop):
        return Drop(stmt.table.lower())
    raise TypeError(f"not a statement: {stmt!r}")


def _select(sel: Select) -> Select:
    items = []
    for item in sel.items:
        if isinstance(item, Star):
            items.append(Star())
        elif isinstance(item, CountStar):
            items.append(CountStar(alias=item.alias.lower() if item.alias else None))
        elif isinstance(item, ColumnProj):
            items.append(
                ColumnProj(item.name.lower(), alias=item.alias.lower() if item.alias else None)
            )
    return Select(
        tuple(items),
        sel.table.lower(),
        where=normalize_expr(sel.where) if sel.where is not None else None,
        group_by=tuple(name.lower() for name in sel.group_by),
        order_by=tuple(
            OrderItem(item.key.lower(), item.descending) for item in sel.order_by
        ),
        limit=sel.limit,
    )


def normalize_expr(expr: Expr) -> Expr:
    if isinstance(expr, Or):
        items = sorted((normalize_expr(item) for item in expr.items), key=print_expr)
        return Or(tuple(items))
    if isinstance(expr, And):
        items = sorted((normalize_expr(item) for item in expr.items), key=print_expr)
        return And(tuple(items))
    if isinstance(expr, Not):
        return Not(normalize_expr(expr.operand))
    if isinstance(expr, Comparison):
        return Comparison(expr.op, normalize_expr(expr.left), normalize_expr(expr.right))
    if isinstance(expr, Like):
        return Like(normalize_expr(expr.operand), _literal(expr.pattern))
    if isinstance(expr, InList):
        return InList(normalize_expr(expr.operand), tuple(_literal(i) for i in expr.items))
    if isinstance(expr, Between):
        return Between(
            normalize_expr(expr.operand),
            normalize_expr(expr.low),
            normalize_expr(expr.high),
        )
    if isinstance(expr, ColumnRef):
        return ColumnRef(expr.name.lower())
    if isinstance(expr, Literal):
        return _literal(expr)
    raise TypeError(f"not an expression: {expr!r}")


def _literal(lit: Literal) -> Literal:
    return Literal(lit.value, lit.ltype)
