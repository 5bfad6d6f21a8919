"""Canonical text rendering of statements.

Keywords print lowercase, strings print single-quoted with doubled-quote
escaping, parentheses appear exactly where the tree shape requires them.
parse(print_sql(s)) reproduces s structurally for every valid Statement.
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
    LiteralType,
    Not,
    Or,
    Select,
    Stacked,
    Star,
    Statement,
    UnionSelect,
    Update,
)

# binding strength, loosest to tightest; atoms sit above all of these
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_PREDICATE = 4


def print_sql(stmt: Statement) -> str:
    if isinstance(stmt, Select):
        return _select(stmt)
    if isinstance(stmt, UnionSelect):
        return " union ".join(_select(sel) for sel in stmt.selects)
    if isinstance(stmt, Stacked):
        return "; ".join(print_sql(part) for part in stmt.parts)
    if isinstance(stmt, Insert):
        cols = f" ({', '.join(stmt.columns)})" if stmt.columns else ""
        rows = ", ".join(
            "(" + ", ".join(_literal(v) for v in row) + ")" for row in stmt.rows
        )
        return f"insert into {stmt.table}{cols} values {rows}"
    if isinstance(stmt, Update):
        sets = ", ".join(f"{name} = {_literal(value)}" for name, value in stmt.assignments)
        out = f"update {stmt.table} set {sets}"
        if stmt.where is not None:
            out += f" where {print_expr(stmt.where)}"
        return out
    if isinstance(stmt, Delete):
        out = f"delete from {stmt.table}"
        if stmt.where is not None:
            out += f" where {print_expr(stmt.where)}"
        return out
    if isinstance(stmt, Drop):
        return f"drop table {stmt.table}"
    raise TypeError(f"not a statement: {stmt!r}")


def _select(sel: Select) -> str:
    items = []
    for item in sel.items:
        if isinstance(item, Star):
            items.append("*")
        elif isinstance(item, CountStar):
            items.append("count(*)" + (f" as {item.alias}" if item.alias else ""))
        elif isinstance(item, ColumnProj):
            items.append(item.name + (f" as {item.alias}" if item.alias else ""))
    out = f"select {', '.join(items)} from {sel.table}"
    if sel.where is not None:
        out += f" where {print_expr(sel.where)}"
    if sel.group_by:
        out += f" group by {', '.join(sel.group_by)}"
    if sel.order_by:
        keys = ", ".join(
            f"{item.key} {'desc' if item.descending else 'asc'}" for item in sel.order_by
        )
        out += f" order by {keys}"
    if sel.limit is not None:
        out += f" limit {sel.limit}"
    return out


def print_expr(expr: Expr, min_prec: int = 0) -> str:
    text, prec = _expr(expr)
    if prec < min_prec:
        return f"({text})"
    return text


def _expr(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, Or):
        parts = [print_expr(item, _PREC_OR + 1) for item in expr.items]
        return " or ".join(parts), _PREC_OR
    if isinstance(expr, And):
        parts = [print_expr(item, _PREC_AND + 1) for item in expr.items]
        return " and ".join(parts), _PREC_AND
    if isinstance(expr, Not):
        return f"not {print_expr(expr.operand, _PREC_NOT)}", _PREC_NOT
    if isinstance(expr, Comparison):
        left = print_expr(expr.left, _PREC_PREDICATE)
        right = print_expr(expr.right, _PREC_PREDICATE)
        return f"{left} {expr.op.value} {right}", _PREC_PREDICATE
    if isinstance(expr, Like):
        operand = print_expr(expr.operand, _PREC_PREDICATE)
        return f"{operand} like {_literal(expr.pattern)}", _PREC_PREDICATE
    if isinstance(expr, InList):
        operand = print_expr(expr.operand, _PREC_PREDICATE)
        values = ", ".join(_literal(item) for item in expr.items)
        return f"{operand} in ({values})", _PREC_PREDICATE
    if isinstance(expr, Between):
        operand = print_expr(expr.operand, _PREC_PREDICATE)
        low = print_expr(expr.low, _PREC_PREDICATE)
        high = print_expr(expr.high, _PREC_PREDICATE)
        return f"{operand} between {low} and {high}", _PREC_PREDICATE
    if isinstance(expr, ColumnRef):
        return expr.name, _PREC_PREDICATE + 1
    if isinstance(expr, Literal):
        return _literal(expr), _PREC_PREDICATE + 1
    raise TypeError(f"not an expression: {expr!r}")


def _literal(lit: Literal) -> str:
    if lit.ltype is LiteralType.STRING:
        escaped = str(lit.value).replace("'", "''")
        return f"'{escaped}'"
    if lit.ltype is LiteralType.FLOAT:
        return repr(float(lit.value))
    return str(lit.value)
