"""The injection rule set.

  R1 tautology          self-equal comparison inside an OR branch of WHERE
  R2 stacked write      stacked statement smuggling a write/drop
  R3 comment truncation comment token straight after a string in WHERE
  R4 union probe        UNION tail targeting an unregistered/system table
  R5 unguarded write    DELETE/UPDATE with no WHERE, or any DROP
  R6 obfuscation        hex or CHAR()-built literals, time-delay functions
  R7 injection residue  unparseable + unbalanced quote + OR/UNION/--/;

Rules operate at their natural level (AST, token stream, or raw text), so
deliberately unparseable payloads are still screened. Each hit carries the
matched fragment and byte offsets for display.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from sqlgate.sql.ast import (
    And,
    Between,
    Comparison,
    CompareOp,
    Delete,
    Drop,
    Expr,
    InList,
    Insert,
    Like,
    Not,
    Or,
    Select,
    Stacked,
    Statement,
    UnionSelect,
    Update,
)
from sqlgate.sql.errors import LexError, UnterminatedString
from sqlgate.sql.normalizer import normalize_expr
from sqlgate.sql.printer import print_expr
from sqlgate.sql.tokens import Token, TokenKind, tokenize
from sqlgate.checker.policy import SYSTEM_TABLES

#: severity used as the verdict score when the rule fires (max wins)
RULE_SCORES = {
    "R1": 1.0,
    "R2": 1.0,
    "R3": 0.9,
    "R4": 0.9,
    "R5": 1.0,
    "R6": 0.8,
    "R7": 0.9,
    "policy": 1.0,
}

_TIME_DELAY_CALLS = frozenset({"char", "chr", "sleep", "benchmark", "pg_sleep"})
_RESIDUE = re.compile(r"\b(?:or|union)\b|--|;", re.IGNORECASE)


@dataclass(frozen=True)
class RuleHit:
    rule: str
    fragment: str
    start: int
    end: int

    @property
    def score(self) -> float:
        return RULE_SCORES[self.rule]

    def to_json(self) -> dict:
        return {
            "rule": self.rule,
            "fragment": self.fragment,
            "start": self.start,
            "end": self.end,
            "score": self.score,
        }


def _fragment(source: Optional[str], span, fallback: str) -> tuple[str, int, int]:
    if source is not None and span is not None:
        data = source.encode("utf-8")
        return data[span[0] : span[1]].decode("utf-8", "replace"), span[0], span[1]
    return fallback, 0, 0


def _statements(stmt: Statement) -> list[Statement]:
    if isinstance(stmt, Stacked):
        return list(stmt.parts)
    return [stmt]


def _selects(stmt: Statement) -> list[Select]:
    out = []
    for part in _statements(stmt):
        if isinstance(part, Select):
            out.append(part)
        elif isinstance(part, UnionSelect):
            out.extend(part.selects)
    return out


def _where_exprs(stmt: Statement) -> list[Expr]:
    exprs = []
    for part in _statements(stmt):
        candidates = []
        if isinstance(part, (Select, Update, Delete)):
            candidates = [part.where]
        elif isinstance(part, UnionSelect):
            candidates = [sel.where for sel in part.selects]
        exprs.extend(c for c in candidates if c is not None)
    return exprs


# ---------------------------------------------------------------- AST rules


def rule_r1_tautology(stmt: Statement, source: Optional[str]) -> list[RuleHit]:
    hits: list[RuleHit] = []

    def walk(expr: Expr, inside_or: bool) -> None:
        if isinstance(expr, Or):
            for item in expr.items:
                walk(item, True)
        elif isinstance(expr, And):
            for item in expr.items:
                walk(item, inside_or)
        elif isinstance(expr, Not):
            walk(expr.operand, inside_or)
        elif isinstance(expr, Comparison):
            if (
                inside_or
                and expr.op is CompareOp.EQ
                and normalize_expr(expr.left) == normalize_expr(expr.right)
            ):
                fragment, start, end = _fragment(source, expr.span, print_expr(expr))
                hits.append(RuleHit("R1", fragment, start, end))
        elif isinstance(expr, (Like, InList, Between)):
            pass

    for where in _where_exprs(stmt):
        walk(where, False)
    return hits


def rule_r2_stacked_write(stmt: Statement, source: Optional[str]) -> list[RuleHit]:
    if not isinstance(stmt, Stacked):
        return []
    hits = []
    for part in stmt.parts:
        if isinstance(part, (Insert, Update, Delete, Drop)):
            fallback = type(part).__name__.lower()
            fragment, start, end = _fragment(source, part.span, fallback)
            hits.append(RuleHit("R2", fragment, start, end))
    return hits


def rule_r4_union_probe(
    stmt: Statement, source: Optional[str], known_tables: Optional[set]
) -> list[RuleHit]:
    hits = []
    known = {name.lower() for name in known_tables} if known_tables is not None else None
    for part in _statements(stmt):
        if not isinstance(part, UnionSelect):
            continue
        for tail in part.selects[1:]:
            table = tail.table.lower()
            outside_schema = known is not None and table not in known
            if outside_schema or table in SYSTEM_TABLES:
                fragment, start, end = _fragment(source, tail.span, tail.table)
                hits.append(RuleHit("R4", fragment, start, end))
    return hits


def rule_r5_unguarded_write(stmt: Statement, source: Optional[str]) -> list[RuleHit]:
    hits = []
    for part in _statements(stmt):
        offending = (
            isinstance(part, (Delete, Update)) and part.where is None
        ) or isinstance(part, Drop)
        if offending:
            fallback = type(part).__name__.lower()
            fragment, start, end = _fragment(source, part.span, fallback)
            hits.append(RuleHit("R5", fragment, start, end))
    return hits


# -------------------------------------------------------------- token rules


def rule_r3_comment_truncation(tokens: list[Token]) -> list[RuleHit]:
    hits = []
    where_seen = False
    previous: Optional[Token] = None
    for tok in tokens:
        if tok.is_keyword("where"):
            where_seen = True
        if (
            tok.kind is TokenKind.COMMENT
            and where_seen
            and previous is not None
            and previous.kind is TokenKind.STRING
        ):
            hits.append(RuleHit("R3", tok.lexeme, tok.offset, tok.end))
        previous = tok
    return hits


def rule_r6_obfuscation(tokens: list[Token]) -> list[RuleHit]:
    hits = []
    for i, tok in enumerate(tokens):
        if tok.kind is TokenKind.INT and tok.lexeme[:2].lower() == "0x":
            hits.append(RuleHit("R6", tok.lexeme, tok.offset, tok.end))
            continue
        if tok.kind is TokenKind.IDENT:
            name = tok.lexeme.lower()
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            calls = (
                nxt is not None and nxt.kind is TokenKind.PUNCT and nxt.value == "("
            )
            if (name in _TIME_DELAY_CALLS and calls) or name == "waitfor":
                hits.append(RuleHit("R6", tok.lexeme, tok.offset, tok.end))
    return hits


# ---------------------------------------------------------------- raw rules


def has_dangling_quote_region(text: str) -> bool:
    """True when a quote region fails to close in some scan orientation.

    Splice payloads (meant to continue a quoted value they did not open,
    e.g. ``x' OR '1'='1``) pair their own quotes cleanly, so plain parity
    misses them. Scanning as-is and as if a quote were already open (one
    prepended quote) covers both orientations; a dangling region in either
    marks the text as a possible splice. Quote-free text never trips this.
    """
    probes = [text]
    if "'" in text:  # splice orientation exists only when the char occurs
        probes.append("'" + text)
    if '"' in text:
        probes.append('"' + text)
    for probe in probes:
        try:
            tokenize(probe, max_bytes=2 * len(probe.encode("utf-8")) + 16)
        except UnterminatedString:
            return True
        except LexError:
            continue
    return False


def rule_r7_injection_residue(text: str, parse_failed: bool) -> list[RuleHit]:
    if not parse_failed:
        return []
    if not has_dangling_quote_region(text):
        return []
    match = _RESIDUE.search(text)
    if match is None:
        return []
    snippet = text if len(text) <= 120 else text[:117] + "..."
    return [RuleHit("R7", snippet, 0, len(text.encode("utf-8")))]
