"""Errors raised by the SQL lexer and parser.

All offsets are byte offsets into the UTF-8 encoding of the input.
"""

from __future__ import annotations

from sqlgate.errors import SqlgateError


class SqlError(SqlgateError):
    """Base for lexer/parser errors; carries the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class LexError(SqlError):
    pass


class UnterminatedString(LexError):
    def __init__(self, offset: int):
        super().__init__("unterminated string literal", offset)


class UnterminatedComment(LexError):
    def __init__(self, offset: int):
        super().__init__("unterminated block comment", offset)


class IllegalCharacter(LexError):
    def __init__(self, offset: int, char: str):
        super().__init__(f"illegal character {char!r}", offset)
        self.char = char


class InputTooLarge(LexError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"input of {size} bytes exceeds cap of {limit}", 0)
        self.size = size
        self.limit = limit


class SqlSyntaxError(SqlError):
    """Malformed input; carries the set of token descriptions expected."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        detail = message
        if expected:
            detail += " (expected " + " or ".join(sorted(expected)) + ")"
        super().__init__(detail, offset)
        self.expected = tuple(sorted(expected))


class UnsupportedFeature(SqlError):
    """Well-formed SQL outside the supported subset (JOIN, subquery, ...)."""

    def __init__(self, feature: str, offset: int):
        super().__init__(f"unsupported SQL feature: {feature}", offset)
        self.feature = feature
