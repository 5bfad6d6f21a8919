"""Recursive-descent parser for the SQL subset.

Single-table SELECT with COUNT(*), WHERE (AND/OR/NOT, comparisons, LIKE,
IN, BETWEEN), GROUP BY, ORDER BY, LIMIT; INSERT/UPDATE/DELETE/DROP and
UNION are parsed so the security checker can classify them. Semicolons
yield Stacked statements. Grammar outside the subset raises
UnsupportedFeature, distinct from SqlSyntaxError, so callers can report
"well-formed but unsupported".
"""

from __future__ import annotations

from typing import Optional, Sequence

from sqlgate.sql.ast import (
    And,
    Between,
    ColumnProj,
    ColumnRef,
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
    LiteralType,
    Not,
    Or,
    OrderItem,
    Select,
    SelectItem,
    Star,
    Stacked,
    Statement,
    UnionSelect,
    Update,
)
from sqlgate.sql.errors import SqlSyntaxError, UnsupportedFeature
from sqlgate.sql.tokens import (
    DEFAULT_MAX_BYTES,
    Token,
    TokenKind,
    UNSUPPORTED_KEYWORDS,
    tokenize,
)

_COMPARE_OPS = {op.value: op for op in CompareOp}
_STATEMENT_KEYWORDS = ("SELECT", "INSERT", "UPDATE", "DELETE", "DROP")


def parse(source: str | Sequence[Token], max_bytes: int = DEFAULT_MAX_BYTES) -> Statement:
    """Parse SQL text (or a pre-tokenized stream) into a Statement.

    Raises SqlSyntaxError or UnsupportedFeature; lexer errors propagate
    when ``source`` is text.
    """
    if isinstance(source, str):
        tokens = tokenize(source, max_bytes=max_bytes)
        end_offset = len(source.encode("utf-8"))
    else:
        tokens = list(source)
        end_offset = tokens[-1].end if tokens else 0

    meaningful = [t for t in tokens if t.kind is not TokenKind.COMMENT]

    groups: list[list[Token]] = []
    current: list[Token] = []
    for tok in meaningful:
        if tok.kind is TokenKind.PUNCT and tok.value == ";":
            if current:
                groups.append(current)
                current = []
        else:
            current.append(tok)
    if current:
        groups.append(current)

    if not groups:
        raise SqlSyntaxError("empty input", 0, expected=_STATEMENT_KEYWORDS)

    parts = [_Parser(group, end_offset).parse_statement() for group in groups]
    if len(parts) == 1:
        return parts[0]
    span = (parts[0].span[0], parts[-1].span[1]) if parts[0].span and parts[-1].span else None
    return Stacked(tuple(parts), span=span)


class _Parser:
    def __init__(self, tokens: list[Token], end_offset: int):
        self.toks = tokens
        self.pos = 0
        self.end_offset = end_offset

    # --------------------------------------------------------------- cursor

    def peek(self) -> Optional[Token]:
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.KEYWORD and tok.value in words

    def at_punct(self, ch: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.PUNCT and tok.value == ch

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.OP and tok.value == op

    def _offset(self) -> int:
        tok = self.peek()
        return tok.offset if tok is not None else self.end_offset

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.KEYWORD and tok.value in UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(tok.value.upper(), tok.offset)
        raise SqlSyntaxError(message, self._offset(), expected=expected)

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            self.fail(f"expected {word.upper()}", expected=(word.upper(),))
        return self.advance()

    def expect_punct(self, ch: str) -> Token:
        if not self.at_punct(ch):
            self.fail(f"expected {ch!r}", expected=(ch,))
        return self.advance()

    def name_token(self, what: str) -> Token:
        """An identifier; COUNT doubles as a plain name outside call position."""
        tok = self.peek()
        if tok is not None and (
            tok.kind is TokenKind.IDENT or tok.is_keyword("count")
        ):
            return self.advance()
        self.fail(f"expected {what}", expected=(what,))

    def _name_value(self, tok: Token) -> str:
        return tok.lexeme if tok.kind is TokenKind.IDENT else tok.lexeme

    # ----------------------------------------------------------- statements

    def parse_statement(self) -> Statement:
        tok = self.peek()
        if tok is None:
            raise SqlSyntaxError("empty statement", self.end_offset, expected=_STATEMENT_KEYWORDS)
        if tok.kind is TokenKind.KEYWORD:
            if tok.value == "select":
                stmt = self.select_chain()
            elif tok.value == "insert":
                stmt = self.insert()
            elif tok.value == "update":
                stmt = self.update()
            elif tok.value == "delete":
                stmt = self.delete()
            elif tok.value == "drop":
                stmt = self.drop()
            else:
                self.fail("expected a statement", expected=_STATEMENT_KEYWORDS)
        else:
            self.fail("expected a statement", expected=_STATEMENT_KEYWORDS)
        if self.peek() is not None:
            self.fail("unexpected trailing input", expected=("end of statement",))
        return stmt

    def select_chain(self) -> Statement:
        selects = [self.select()]
        while self.at_keyword("union"):
            prev = selects[-1]
            if prev.order_by or prev.limit is not None:
                raise SqlSyntaxError(
                    "ORDER BY/LIMIT may only follow the final UNION member",
                    self._offset(),
                )
            union_tok = self.advance()
            if self.at_keyword("all"):
                raise UnsupportedFeature("UNION ALL", union_tok.offset)
            selects.append(self.select())
        if len(selects) == 1:
            return selects[0]
        span = (selects[0].span[0], selects[-1].span[1])
        return UnionSelect(tuple(selects), span=span)

    def select(self) -> Select:
        start = self.expect_keyword("select")
        if self.at_keyword("distinct"):
            raise UnsupportedFeature("DISTINCT", self._offset())
        items: list[SelectItem] = []
        if self.at_op("*"):
            tok = self.advance()
            items.append(Star(span=(tok.offset, tok.end)))
        else:
            items.append(self.select_item())
            while self.at_punct(","):
                self.advance()
                items.append(self.select_item())
        self.expect_keyword("from")
        table_tok = self.table_name()
        where = None
        if self.at_keyword("where"):
            self.advance()
            where = self.expr()
        group_by: list[str] = []
        if self.at_keyword("group"):
            self.advance()
            self.expect_keyword("by")
            group_by.append(self.name_token("group-by column").lexeme)
            while self.at_punct(","):
                self.advance()
                group_by.append(self.name_token("group-by column").lexeme)
        order_by: list[OrderItem] = []
        if self.at_keyword("order"):
            self.advance()
            self.expect_keyword("by")
            order_by.append(self.order_item())
            while self.at_punct(","):
                self.advance()
                order_by.append(self.order_item())
        limit = None
        end = self.toks[self.pos - 1].end
        if self.at_keyword("limit"):
            self.advance()
            tok = self.peek()
            if tok is None or tok.kind is not TokenKind.INT:
                self.fail("LIMIT requires a non-negative integer", expected=("integer",))
            limit = self.advance().value
        end = self.toks[self.pos - 1].end
        return Select(
            tuple(items),
            table_tok.lexeme,
            where=where,
            group_by=tuple(group_by),
            order_by=tuple(order_by),
            limit=limit,
            span=(start.offset, end),
        )

    def select_item(self) -> SelectItem:
        tok = self.peek()
        if tok is not None and tok.is_keyword("count") and self._next_is_punct("("):
            start = self.advance()
            self.expect_punct("(")
            if not self.at_op("*"):
                self.fail("only COUNT(*) is supported", expected=("*",))
            self.advance()
            close = self.expect_punct(")")
            alias = self.optional_alias()
            end = close.end if alias is None else self.toks[self.pos - 1].end
            return CountStar(alias=alias, span=(start.offset, end))
        name = self.name_token("projection column")
        alias = self.optional_alias()
        end = name.end if alias is None else self.toks[self.pos - 1].end
        return ColumnProj(name.lexeme, alias=alias, span=(name.offset, end))

    def _next_is_punct(self, ch: str) -> bool:
        nxt = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
        return nxt is not None and nxt.kind is TokenKind.PUNCT and nxt.value == ch

    def optional_alias(self) -> Optional[str]:
        if self.at_keyword("as"):
            self.advance()
            return self.name_token("alias").lexeme
        return None

    def table_name(self) -> Token:
        if self.at_punct("("):
            nxt = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
            if nxt is not None and nxt.is_keyword("select"):
                raise UnsupportedFeature("subquery", self._offset())
        tok = self.name_token("table name")
        if self.at_punct("."):
            raise UnsupportedFeature("qualified table name", tok.offset)
        return tok

    def order_item(self) -> OrderItem:
        name = self.name_token("order-by key")
        descending = False
        end = name.end
        if self.at_keyword("asc"):
            end = self.advance().end
        elif self.at_keyword("desc"):
            end = self.advance().end
            descending = True
        return OrderItem(name.lexeme, descending, span=(name.offset, end))

    def insert(self) -> Insert:
        start = self.expect_keyword("insert")
        self.expect_keyword("into")
        table = self.table_name()
        columns = None
        if self.at_punct("("):
            self.advance()
            cols = [self.name_token("column name").lexeme]
            while self.at_punct(","):
                self.advance()
                cols.append(self.name_token("column name").lexeme)
            self.expect_punct(")")
            columns = tuple(cols)
        self.expect_keyword("values")
        rows = [self.value_row()]
        while self.at_punct(","):
            self.advance()
            rows.append(self.value_row())
        end = self.toks[self.pos - 1].end
        return Insert(table.lexeme, columns, tuple(rows), span=(start.offset, end))

    def value_row(self) -> tuple[Literal, ...]:
        self.expect_punct("(")
        values = [self.literal()]
        while self.at_punct(","):
            self.advance()
            values.append(self.literal())
        self.expect_punct(")")
        return tuple(values)

    def update(self) -> Update:
        start = self.expect_keyword("update")
        table = self.table_name()
        self.expect_keyword("set")
        assignments = [self.assignment()]
        while self.at_punct(","):
            self.advance()
            assignments.append(self.assignment())
        where = None
        if self.at_keyword("where"):
            self.advance()
            where = self.expr()
        end = self.toks[self.pos - 1].end
        return Update(table.lexeme, tuple(assignments), where=where, span=(start.offset, end))

    def assignment(self) -> tuple[str, Literal]:
        name = self.name_token("column name")
        if not self.at_op("="):
            self.fail("expected '='", expected=("=",))
        self.advance()
        return (name.lexeme, self.literal())

    def delete(self) -> Delete:
        start = self.expect_keyword("delete")
        self.expect_keyword("from")
        table = self.table_name()
        where = None
        if self.at_keyword("where"):
            self.advance()
            where = self.expr()
        end = self.toks[self.pos - 1].end
        return Delete(table.lexeme, where=where, span=(start.offset, end))

    def drop(self) -> Drop:
        start = self.expect_keyword("drop")
        self.expect_keyword("table")
        table = self.table_name()
        return Drop(table.lexeme, span=(start.offset, table.end))

    # ---------------------------------------------------------- expressions

    def expr(self) -> Expr:
        return self.or_expr()

    def or_expr(self) -> Expr:
        items = [self.and_expr()]
        while self.at_keyword("or"):
            self.advance()
            items.append(self.and_expr())
        if len(items) == 1:
            return items[0]
        return _bool_node(Or, items)

    def and_expr(self) -> Expr:
        items = [self.not_expr()]
        while self.at_keyword("and"):
            self.advance()
            items.append(self.not_expr())
        if len(items) == 1:
            return items[0]
        return _bool_node(And, items)

    def not_expr(self) -> Expr:
        if self.at_keyword("not"):
            tok = self.advance()
            operand = self.not_expr()
            return Not(operand, span=(tok.offset, _span_end(operand, tok.end)))
        return self.predicate()

    def predicate(self) -> Expr:
        if self.at_punct("("):
            open_tok = self.advance()
            if self.at_keyword("select"):
                raise UnsupportedFeature("subquery", open_tok.offset)
            inner = self.expr()
            self.expect_punct(")")
            return inner  # grouping is structural, no paren node
        left = self.term()
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.OP and tok.value in _COMPARE_OPS:
            self.advance()
            right = self.term()
            return Comparison(
                _COMPARE_OPS[tok.value],
                left,
                right,
                span=(left.span[0], right.span[1]),
            )
        negated = False
        if self.at_keyword("not"):
            nxt = self.toks[self.pos + 1] if self.pos + 1 < len(self.toks) else None
            if nxt is not None and nxt.kind is TokenKind.KEYWORD and nxt.value in (
                "like",
                "in",
                "between",
            ):
                self.advance()
                negated = True
            else:
                self.fail("expected LIKE, IN, or BETWEEN after NOT")
        if self.at_keyword("like"):
            self.advance()
            pattern = self.string_literal("LIKE pattern")
            node: Expr = Like(left, pattern, span=(left.span[0], pattern.span[1]))
        elif self.at_keyword("in"):
            self.advance()
            open_tok = self.expect_punct("(")
            if self.at_keyword("select"):
                raise UnsupportedFeature("subquery", open_tok.offset)
            items = [self.literal()]
            while self.at_punct(","):
                self.advance()
                items.append(self.literal())
            close = self.expect_punct(")")
            node = InList(left, tuple(items), span=(left.span[0], close.end))
        elif self.at_keyword("between"):
            self.advance()
            low = self.term()
            self.expect_keyword("and")
            high = self.term()
            node = Between(left, low, high, span=(left.span[0], high.span[1]))
        else:
            self.fail(
                "expected a comparison",
                expected=tuple(_COMPARE_OPS) + ("LIKE", "IN", "BETWEEN"),
            )
        if negated:
            node = Not(node, span=node.span)
        return node

    def term(self) -> Expr:
        tok = self.peek()
        if tok is None:
            self.fail("expected a column or literal", expected=("column", "literal"))
        if tok.kind is TokenKind.IDENT or tok.is_keyword("count"):
            self.advance()
            return ColumnRef(tok.lexeme, span=(tok.offset, tok.end))
        return self.literal()

    def literal(self) -> Literal:
        tok = self.peek()
        if tok is None:
            self.fail("expected a literal", expected=("literal",))
        if tok.kind is TokenKind.STRING:
            self.advance()
            return Literal(tok.value, LiteralType.STRING, span=(tok.offset, tok.end))
        negative = False
        start = tok.offset
        if tok.kind is TokenKind.OP and tok.value == "-":
            self.advance()
            negative = True
            tok = self.peek()
            if tok is None or tok.kind not in (TokenKind.INT, TokenKind.FLOAT):
                self.fail("expected a number after '-'", expected=("number",))
        if tok.kind is TokenKind.INT:
            self.advance()
            value = -tok.value if negative else tok.value
            return Literal(value, LiteralType.INT, span=(start, tok.end))
        if tok.kind is TokenKind.FLOAT:
            self.advance()
            value = -tok.value if negative else tok.value
            return Literal(value, LiteralType.FLOAT, span=(start, tok.end))
        self.fail("expected a literal", expected=("literal",))

    def string_literal(self, what: str) -> Literal:
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.STRING:
            self.fail(f"expected a string for {what}", expected=("string literal",))
        self.advance()
        return Literal(tok.value, LiteralType.STRING, span=(tok.offset, tok.end))


def _span_end(node, fallback: int) -> int:
    return node.span[1] if node.span else fallback


def _bool_node(cls, items: list[Expr]):
    flat: list[Expr] = []
    for item in items:
        if isinstance(item, cls):  # splice parenthesized same-op chains
            flat.extend(item.items)
        else:
            flat.append(item)
    span = (flat[0].span[0], flat[-1].span[1]) if flat[0].span and flat[-1].span else None
    return cls(tuple(flat), span=span)
