"""Syntax tree for the SQL subset, plus table schemas.

Nodes are immutable dataclasses compared structurally; source spans (byte
offsets) are carried for checker/UI display but excluded from equality so
round-tripped trees compare equal.

Grouping is structural: there is no parenthesis node. The parser shapes
the tree from parentheses and precedence, the printer re-inserts parens
wherever the tree requires them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from sqlgate.errors import SqlgateError

Span = tuple[int, int]


class InvalidStatement(SqlgateError):
    """A node violates a structural invariant of the subset."""


# ---------------------------------------------------------------- expressions


class CompareOp(Enum):
    EQ = "="
    NE = "!="
    LT = "<"
    LE = "<="
    GT = ">"
    GE = ">="


class LiteralType(Enum):
    STRING = "string"  # also carries date-as-string values
    INT = "int"
    FLOAT = "float"


@dataclass(frozen=True)
class ColumnRef:
    name: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    value: object
    ltype: LiteralType
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    @staticmethod
    def string(value: str) -> "Literal":
        return Literal(value, LiteralType.STRING)

    @staticmethod
    def int_(value: int) -> "Literal":
        return Literal(value, LiteralType.INT)

    @staticmethod
    def float_(value: float) -> "Literal":
        return Literal(value, LiteralType.FLOAT)


@dataclass(frozen=True)
class Comparison:
    op: CompareOp
    left: "Expr"
    right: "Expr"
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Like:
    operand: "Expr"
    pattern: Literal  # % and _ preserved verbatim
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.pattern.ltype is not LiteralType.STRING:
            raise InvalidStatement("LIKE pattern must be a string literal")


@dataclass(frozen=True)
class InList:
    operand: "Expr"
    items: tuple[Literal, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.items:
            raise InvalidStatement("IN list must be non-empty")


@dataclass(frozen=True)
class Between:
    operand: "Expr"
    low: "Expr"
    high: "Expr"
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class And:
    items: tuple["Expr", ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.items) < 2:
            raise InvalidStatement("AND requires at least two operands")
        if any(isinstance(item, And) for item in self.items):
            raise InvalidStatement("AND operand lists must be flattened")


@dataclass(frozen=True)
class Or:
    items: tuple["Expr", ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.items) < 2:
            raise InvalidStatement("OR requires at least two operands")
        if any(isinstance(item, Or) for item in self.items):
            raise InvalidStatement("OR operand lists must be flattened")


@dataclass(frozen=True)
class Not:
    operand: "Expr"
    span: Optional[Span] = field(default=None, compare=False, repr=False)


Expr = Union[ColumnRef, Literal, Comparison, Like, InList, Between, And, Or, Not]


# ----------------------------------------------------------------- statements


@dataclass(frozen=True)
class Star:
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ColumnProj:
    name: str
    alias: Optional[str] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class CountStar:
    alias: Optional[str] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


SelectItem = Union[Star, ColumnProj, CountStar]


@dataclass(frozen=True)
class OrderItem:
    key: str  # projected column, projected alias, or group-by column
    descending: bool = False
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Select:
    items: tuple[SelectItem, ...]
    table: str
    where: Optional[Expr] = None
    group_by: tuple[str, ...] = ()
    order_by: tuple[OrderItem, ...] = ()
    limit: Optional[int] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.items:
            raise InvalidStatement("projection must be non-empty")
        if any(isinstance(it, Star) for it in self.items) and len(self.items) > 1:
            raise InvalidStatement("* cannot be combined with other projections")
        if self.limit is not None and self.limit < 0:
            raise InvalidStatement("LIMIT must be >= 0")
        if self.group_by and self.order_by and not self.has_star():
            allowed = {name.lower() for name in self.group_by}
            allowed.update(self.projected_names())
            for item in self.order_by:
                if item.key.lower() not in allowed:
                    raise InvalidStatement(
                        f"ORDER BY key {item.key!r} is not a projected column, "
                        "alias, or group-by column"
                    )

    def has_star(self) -> bool:
        return any(isinstance(it, Star) for it in self.items)

    def projected_names(self) -> set[str]:
        """Lower-cased column names and aliases visible in the projection."""
        names: set[str] = set()
        for it in self.items:
            if isinstance(it, ColumnProj):
                names.add((it.alias or it.name).lower())
                names.add(it.name.lower())
            elif isinstance(it, CountStar) and it.alias:
                names.add(it.alias.lower())
        return names


@dataclass(frozen=True)
class Insert:
    table: str
    columns: Optional[tuple[str, ...]]
    rows: tuple[tuple[Literal, ...], ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.rows or any(not row for row in self.rows):
            raise InvalidStatement("INSERT requires at least one non-empty value row")


@dataclass(frozen=True)
class Update:
    table: str
    assignments: tuple[tuple[str, Literal], ...]
    where: Optional[Expr] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.assignments:
            raise InvalidStatement("UPDATE requires at least one assignment")


@dataclass(frozen=True)
class Delete:
    table: str
    where: Optional[Expr] = None
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Drop:
    table: str
    span: Optional[Span] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class UnionSelect:
    selects: tuple[Select, ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.selects) < 2:
            raise InvalidStatement("UNION requires at least two selects")
        for sel in self.selects[:-1]:
            if sel.order_by or sel.limit is not None:
                raise InvalidStatement(
                    "only the final UNION member may carry ORDER BY/LIMIT"
                )


@dataclass(frozen=True)
class Stacked:
    parts: tuple["Statement", ...]
    span: Optional[Span] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.parts) < 2:
            raise InvalidStatement("a stacked statement holds >= 2 statements")
        if any(isinstance(p, Stacked) for p in self.parts):
            raise InvalidStatement("stacked statements do not nest")


Statement = Union[Select, Insert, Update, Delete, Drop, UnionSelect, Stacked]

#: lowercase class tag used by security policies ("statement class allow-list")
def statement_class(stmt: Statement) -> str:
    return {
        Select: "select",
        Insert: "insert",
        Update: "update",
        Delete: "delete",
        Drop: "drop",
        UnionSelect: "union",
        Stacked: "stacked",
    }[type(stmt)]


# --------------------------------------------------------------------- schema


class ColumnType(Enum):
    TEXT = "text"
    INT = "int"
    FLOAT = "float"
    DATE = "date-text"  # ISO date kept as text; compares lexicographically


@dataclass(frozen=True)
class Column:
    name: str
    ctype: ColumnType


class Schema:
    """Registered tables: name -> ordered column list.

    Table and column names are unique case-insensitively; lookups are
    case-insensitive and return the registered spelling.
    """

    def __init__(self, tables: dict[str, list[Column]]):
        if not tables:
            raise InvalidStatement("schema must contain at least one table")
        seen: set[str] = set()
        for name, cols in tables.items():
            low = name.lower()
            if low in seen:
                raise InvalidStatement(f"duplicate table name {name!r}")
            seen.add(low)
            if not cols:
                raise InvalidStatement(f"table {name!r} has no columns")
            col_seen: set[str] = set()
            for col in cols:
                if col.name.lower() in col_seen:
                    raise InvalidStatement(
                        f"duplicate column {col.name!r} in table {name!r}"
                    )
                col_seen.add(col.name.lower())
        self.tables: dict[str, tuple[Column, ...]] = {
            name: tuple(cols) for name, cols in tables.items()
        }
        self._by_lower = {name.lower(): name for name in self.tables}

    def table_names(self) -> list[str]:
        return list(self.tables)

    def has_table(self, name: str) -> bool:
        return name.lower() in self._by_lower

    def resolve_table(self, name: str) -> str:
        try:
            return self._by_lower[name.lower()]
        except KeyError:
            raise KeyError(f"unknown table {name!r}") from None

    def columns(self, table: str) -> tuple[Column, ...]:
        return self.tables[self.resolve_table(table)]

    def column(self, table: str, name: str) -> Column:
        for col in self.columns(table):
            if col.name.lower() == name.lower():
                return col
        raise KeyError(f"unknown column {name!r} in table {table!r}")

    def has_column(self, table: str, name: str) -> bool:
        try:
            self.column(table, name)
            return True
        except KeyError:
            return False

    def to_json(self) -> dict:
        return {
            "tables": {
                name: [{"name": c.name, "type": c.ctype.value} for c in cols]
                for name, cols in self.tables.items()
            }
        }

    @staticmethod
    def from_json(doc: dict) -> "Schema":
        tables = {
            name: [Column(c["name"], ColumnType(c["type"])) for c in cols]
            for name, cols in doc["tables"].items()
        }
        return Schema(tables)
