"""Lossless tokenizer for the SQL subset.

The scanner works on the UTF-8 byte form of the input so every token and
every error carries a true byte offset. Comments are kept as ordinary
tokens: the security checker inspects them (comment truncation is an
injection signature), the parser skips them.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from sqlgate.sql.errors import (
    IllegalCharacter,
    InputTooLarge,
    UnterminatedComment,
    UnterminatedString,
)

DEFAULT_MAX_BYTES = 64 * 1024

KEYWORDS = frozenset(
    """
    select from where group by order asc desc limit as and or not like in
    between count insert into values update set delete drop table union
    """.split()
)

# Recognized so the parser can report "well-formed but unsupported" instead
# of a bare syntax error.
UNSUPPORTED_KEYWORDS = frozenset(
    """
    join inner left right outer cross on having distinct exists create
    alter truncate sum avg min max offset is null all
    """.split()
)


class TokenKind(Enum):
    KEYWORD = auto()
    IDENT = auto()
    STRING = auto()
    INT = auto()
    FLOAT = auto()
    OP = auto()
    PUNCT = auto()
    COMMENT = auto()


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str  # exact source slice
    value: object  # decoded payload (str for strings, int/float for numbers)
    offset: int  # byte offset of first byte
    end: int  # byte offset one past the last byte

    def is_keyword(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.value == word


_WHITESPACE = b" \t\r\n\f\v"
_OPERATOR_STARTS = b"=!<>*"
_PUNCT = b"(),;."


def _is_ident_start(b: int) -> bool:
    return b == 0x5F or 0x41 <= b <= 0x5A or 0x61 <= b <= 0x7A


def _is_ident_part(b: int) -> bool:
    return _is_ident_start(b) or 0x30 <= b <= 0x39


def _is_digit(b: int) -> bool:
    return 0x30 <= b <= 0x39


def tokenize(text: str, max_bytes: int = DEFAULT_MAX_BYTES) -> list[Token]:
    """Scan ``text`` into tokens; comments retained, whitespace dropped.

    Raises UnterminatedString/UnterminatedComment/IllegalCharacter with the
    byte offset of the fault, InputTooLarge when the input exceeds the cap.
    """
    data = text.encode("utf-8")
    if len(data) > max_bytes:
        raise InputTooLarge(len(data), max_bytes)

    tokens: list[Token] = []
    pos = 0
    n = len(data)

    def emit(kind: TokenKind, start: int, end: int, value: object) -> None:
        tokens.append(Token(kind, data[start:end].decode("utf-8"), value, start, end))

    while pos < n:
        b = data[pos]

        if b in _WHITESPACE:
            pos += 1
            continue

        # -- line comment and /* */ block comment; # line comment
        if b == 0x2D:
            if pos + 1 < n and data[pos + 1] == 0x2D:  # --
                end = data.find(b"\n", pos)
                end = n if end < 0 else end
                emit(TokenKind.COMMENT, pos, end, data[pos:end].decode("utf-8"))
                pos = end
            else:  # unary minus for negative literals
                emit(TokenKind.OP, pos, pos + 1, "-")
                pos += 1
            continue
        if b == 0x23:  # '#'
            end = data.find(b"\n", pos)
            end = n if end < 0 else end
            emit(TokenKind.COMMENT, pos, end, data[pos:end].decode("utf-8"))
            pos = end
            continue
        if b == 0x2F and pos + 1 < n and data[pos + 1] == 0x2A:  # /*
            close = data.find(b"*/", pos + 2)
            if close < 0:
                raise UnterminatedComment(pos)
            end = close + 2
            emit(TokenKind.COMMENT, pos, end, data[pos:end].decode("utf-8"))
            pos = end
            continue

        if b in (0x27, 0x22):  # ' or "
            quote = b
            scan = pos + 1
            pieces: list[bytes] = []
            while True:
                nxt = data.find(bytes([quote]), scan)
                if nxt < 0:
                    raise UnterminatedString(pos)
                if nxt + 1 < n and data[nxt + 1] == quote:  # doubled-quote escape
                    pieces.append(data[scan : nxt + 1])
                    scan = nxt + 2
                    continue
                pieces.append(data[scan:nxt])
                end = nxt + 1
                break
            emit(TokenKind.STRING, pos, end, b"".join(pieces).decode("utf-8"))
            pos = end
            continue

        if _is_digit(b):
            start = pos
            if b == 0x30 and pos + 1 < n and data[pos + 1] in (0x78, 0x58):  # 0x hex
                scan = pos + 2
                while scan < n and data[scan : scan + 1].isalnum() and chr(data[scan]) in "0123456789abcdefABCDEF":
                    scan += 1
                if scan > pos + 2:
                    emit(TokenKind.INT, start, scan, int(data[start:scan], 16))
                    pos = scan
                    continue
            scan = pos
            while scan < n and _is_digit(data[scan]):
                scan += 1
            is_float = False
            if scan + 1 < n and data[scan] == 0x2E and _is_digit(data[scan + 1]):
                is_float = True
                scan += 1
                while scan < n and _is_digit(data[scan]):
                    scan += 1
            lexeme = data[start:scan].decode("utf-8")
            if is_float:
                emit(TokenKind.FLOAT, start, scan, float(lexeme))
            else:
                emit(TokenKind.INT, start, scan, int(lexeme))
            pos = scan
            continue

        if _is_ident_start(b):
            start = pos
            scan = pos + 1
            while scan < n and _is_ident_part(data[scan]):
                scan += 1
            word = data[start:scan].decode("utf-8")
            lowered = word.lower()
            if lowered in KEYWORDS or lowered in UNSUPPORTED_KEYWORDS:
                emit(TokenKind.KEYWORD, start, scan, lowered)
            else:
                emit(TokenKind.IDENT, start, scan, word)
            pos = scan
            continue

        if b in _OPERATOR_STARTS:
            two = data[pos : pos + 2]
            if two in (b">=", b"<=", b"!=", b"<>"):
                emit(TokenKind.OP, pos, pos + 2, "!=" if two == b"<>" else two.decode())
                pos += 2
                continue
            if b == 0x21:  # lone '!'
                raise IllegalCharacter(pos, "!")
            emit(TokenKind.OP, pos, pos + 1, chr(b))
            pos += 1
            continue

        if b in _PUNCT:
            emit(TokenKind.PUNCT, pos, pos + 1, chr(b))
            pos += 1
            continue

        # Decode one code point for a readable error message.
        tail = data[pos : pos + 4].decode("utf-8", errors="replace")
        raise IllegalCharacter(pos, tail[0] if tail else "?")

    return tokens


def reassemble(text: str, tokens: list[Token]) -> str:
    """Rebuild the input from token lexemes plus the original whitespace map.

    Used by the losslessness property test: the result must equal ``text``
    byte-for-byte.
    """
    data = text.encode("utf-8")
    out = bytearray()
    cursor = 0
    for tok in tokens:
        out += data[cursor : tok.offset]  # original whitespace gap
        out += tok.lexeme.encode("utf-8")
        cursor = tok.end
    out += data[cursor:]
    return out.decode("utf-8")
