"""Prompt construction for completion backends.

The rendered text is deterministic: schema tables serialize in
registration order, exemplars appear verbatim in input order.
"""

from __future__ import annotations

from dataclasses import dataclass

from sqlgate.errors import SqlgateError
from sqlgate.generator.base import ExemplarInvalid
from sqlgate.sql import parse
from sqlgate.sql.ast import (
    And,
    Between,
    ColumnProj,
    ColumnRef,
    Comparison,
    Expr,
    InList,
    Like,
    Not,
    Or,
    Schema,
    Select,
)

_INSTRUCTION = (
    "You translate analyst questions into SQL for the tables below.\n"
    "Use only these tables and columns. Reply with a single SQL statement."
)


@dataclass(frozen=True)
class PromptTemplate:
    text: str
    exemplar_count: int


def _where_columns(expr: Expr) -> list[str]:
    if isinstance(expr, ColumnRef):
        return [expr.name]
    if isinstance(expr, (And, Or)):
        return [name for item in expr.items for name in _where_columns(item)]
    if isinstance(expr, Not):
        return _where_columns(expr.operand)
    if isinstance(expr, Comparison):
        return _where_columns(expr.left) + _where_columns(expr.right)
    if isinstance(expr, (Like, InList)):
        return _where_columns(expr.operand)
    if isinstance(expr, Between):
        return (
            _where_columns(expr.operand)
            + _where_columns(expr.low)
            + _where_columns(expr.high)
        )
    return []


def _check_exemplar(index: int, nl: str, sql: str, schema: Schema) -> None:
    try:
        stmt = parse(sql)
    except SqlgateError as exc:
        raise ExemplarInvalid(index, nl, f"does not parse: {exc}") from None
    selects = stmt.selects if hasattr(stmt, "selects") else [stmt]
    for sel in selects:
        if not isinstance(sel, Select):
            raise ExemplarInvalid(index, nl, "exemplars must be SELECT statements")
        if not schema.has_table(sel.table):
            raise ExemplarInvalid(index, nl, f"unknown table {sel.table!r}")
        names = [it.name for it in sel.items if isinstance(it, ColumnProj)]
        names += list(sel.group_by)
        if sel.where is not None:
            names += _where_columns(sel.where)
        for name in names:
            if not schema.has_column(sel.table, name):
                raise ExemplarInvalid(
                    index, nl, f"unknown column {name!r} in table {sel.table!r}"
                )


def build_prompt(
    schema: Schema, exemplars: list[tuple[str, str]], nl_query: str
) -> PromptTemplate:
    """Render instruction + serialized schema + few-shot exemplars + query."""
    for index, (nl, sql) in enumerate(exemplars):
        _check_exemplar(index, nl, sql, schema)
    lines = [_INSTRUCTION, "", "Tables:"]
    for name, columns in schema.tables.items():
        cols = ", ".join(f"{c.name} {c.ctype.value}" for c in columns)
        lines.append(f"  {name}({cols})")
    if exemplars:
        lines.append("")
        lines.append("Examples:")
        for nl, sql in exemplars:
            lines.append(f"  Q: {nl}")
            lines.append(f"  SQL: {sql}")
    lines.append("")
    lines.append(f"Q: {nl_query}")
    lines.append("SQL:")
    return PromptTemplate("\n".join(lines), exemplar_count=len(exemplars))
