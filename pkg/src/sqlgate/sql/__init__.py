"""SQL subset toolkit: lexer, parser, AST, printer, normalizer."""

from sqlgate.sql.ast import (
    And,
    Between,
    Column,
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
    InvalidStatement,
    Like,
    Literal,
    LiteralType,
    Not,
    Or,
    OrderItem,
    Schema,
    Select,
    SelectItem,
    Stacked,
    Star,
    Statement,
    UnionSelect,
    Update,
    statement_class,
)
from sqlgate.sql.errors import (
    IllegalCharacter,
    InputTooLarge,
    LexError,
    SqlError,
    SqlSyntaxError,
    UnsupportedFeature,
    UnterminatedComment,
    UnterminatedString,
)
from sqlgate.sql.normalizer import normalize, normalize_expr
from sqlgate.sql.parser import parse
from sqlgate.sql.printer import print_expr, print_sql
from sqlgate.sql.tokens import Token, TokenKind, tokenize, reassemble

__all__ = [
    "And", "Between", "Column", "ColumnProj", "ColumnRef", "ColumnType",
    "Comparison", "CompareOp", "CountStar", "Delete", "Drop", "Expr",
    "InList", "Insert", "InvalidStatement", "Like", "Literal", "LiteralType",
    "Not", "Or", "OrderItem", "Schema", "Select", "SelectItem", "Stacked",
    "Star", "Statement", "UnionSelect", "Update", "statement_class",
    "IllegalCharacter", "InputTooLarge", "LexError", "SqlError",
    "SqlSyntaxError", "UnsupportedFeature", "UnterminatedComment",
    "UnterminatedString", "normalize", "normalize_expr", "parse",
    "print_expr", "print_sql", "Token", "TokenKind", "tokenize", "reassemble",
]
