"""Rule-based NL-to-SQL backend: deterministic, schema-grounded, hermetic.

Intent patterns, in priority order:

  top-N     "top <N> ... <column> ..."        -> grouped count, ordered desc
  count     leading "count ..." / "how many"  -> global COUNT(*)
  filtered  show/list/find/display/...        -> SELECT * with filters

Entities resolve by longest-match against schema table/column names plus a
per-column synonym map (configurable). Filter cues:

  "<column> of|is|equals <Value>"  -> LIKE '%Value%' (text), = (numeric)
  "after|since <year>"             -> date column >= '<year>'
  "before <year>" / "until <year>" -> date column <  / <= '<year>'

Values are quoted strings, numbers, or capitalized word runs. Every
success is built as an AST and printed, so the backend can only emit SQL
that parses.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass
from typing import Optional

from sqlgate.generator.base import GenerationRequest, GenerationResult, NoMatch
from sqlgate.sql.ast import (
    And,
    ColumnProj,
    ColumnRef,
    ColumnType,
    Comparison,
    CompareOp,
    CountStar,
    Expr,
    Like,
    Literal,
    OrderItem,
    Schema,
    Select,
    Star,
)
from sqlgate.sql.printer import print_sql

_TOPN = re.compile(r"\btop\s+(\d+)\b")
_COUNT_CUES = re.compile(r"^\s*count\b|\bhow many\b|\bnumber of\b")
_SELECT_CUES = re.compile(r"\b(show|list|find|display|fetch|get|retrieve|give)\b")
_DATE_CUE = re.compile(r"\b(after|since|before|until)\s+['\"]?(\d{4})\b")
_FILTER_LINK = re.compile(r"\s+(?:of|is|equals|=)\s+")
_QUOTED = re.compile(r"'([^']+)'|\"([^\"]+)\"")
_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")
_CAP_RUN = re.compile(r"[A-Z][\w&.'-]*(?:\s+[A-Z][\w&.'-]*)*")

_DATE_OPS = {"after": CompareOp.GE, "since": CompareOp.GE, "before": CompareOp.LT, "until": CompareOp.LE}


@dataclass
class _Mention:
    start: int
    end: int
    column: str
    consumed: bool = False


class TemplateBackend:
    backend_id = "template"

    def __init__(self, schema: Schema, synonyms: Optional[dict] = None):
        self.schema = schema
        synonyms = synonyms or {}
        self.table_synonyms: dict[str, list[str]] = {}
        for table in schema.table_names():
            phrases = [table.lower(), table.lower().replace("_", " ")]
            phrases += [p.lower() for p in synonyms.get("tables", {}).get(table, [])]
            self.table_synonyms[table] = sorted(set(phrases), key=len, reverse=True)
        self.column_synonyms: dict[str, dict[str, list[str]]] = {}
        for table in schema.table_names():
            per_col = {}
            configured = synonyms.get("columns", {}).get(table, {})
            for col in schema.columns(table):
                phrases = [col.name.lower(), col.name.lower().replace("_", " ")]
                phrases += [p.lower() for p in configured.get(col.name, [])]
                per_col[col.name] = sorted(set(phrases), key=len, reverse=True)
            self.column_synonyms[table] = per_col

    # ------------------------------------------------------------ pipeline

    def generate(self, request: GenerationRequest) -> GenerationResult:
        started = time.perf_counter()
        stmt = self.translate(request.nl_query)
        sql = print_sql(stmt)
        return GenerationResult(
            [sql], self.backend_id, elapsed_s=time.perf_counter() - started
        )

    def translate(self, nl: str) -> Select:
        lower = nl.lower()
        table = self._find_table(lower)
        mentions = self._column_mentions(lower, table)
        filters = self._extract_filters(nl, lower, table, mentions)

        topn = _TOPN.search(lower)
        if topn is not None:
            group_col = self._group_column(mentions, topn.end())
            if group_col is not None:
                where = _combine(filters)
                return Select(
                    (ColumnProj(group_col), CountStar(alias="count")),
                    table,
                    where=where,
                    group_by=(group_col,),
                    order_by=(OrderItem("count", descending=True),),
                    limit=int(topn.group(1)),
                )
        if _COUNT_CUES.search(lower):
            return Select((CountStar(),), table, where=_combine(filters))
        if _SELECT_CUES.search(lower) or filters:
            return Select((Star(),), table, where=_combine(filters))
        raise NoMatch("no intent cue (top-N, count, or selection) found")

    # ------------------------------------------------------------ entities

    def _find_table(self, lower: str) -> str:
        best: Optional[tuple[int, str]] = None
        for table, phrases in self.table_synonyms.items():
            for phrase in phrases:
                if re.search(rf"\b{re.escape(phrase)}s?\b", lower):
                    if best is None or len(phrase) > best[0]:
                        best = (len(phrase), table)
                    break
        if best is not None:
            return best[1]
        names = self.schema.table_names()
        if len(names) == 1:  # unambiguous deployment: one registered table
            return names[0]
        raise NoMatch("no table mention and schema has several tables")

    def _column_mentions(self, lower: str, table: str) -> list[_Mention]:
        found: list[_Mention] = []
        taken: list[tuple[int, int]] = []
        phrase_to_col = []
        for col, phrases in self.column_synonyms[table].items():
            for phrase in phrases:
                phrase_to_col.append((phrase, col))
        phrase_to_col.sort(key=lambda pc: len(pc[0]), reverse=True)  # longest first
        for phrase, col in phrase_to_col:
            for match in re.finditer(rf"\b{re.escape(phrase)}s?\b", lower):
                span = (match.start(), match.end())
                if any(s < span[1] and span[0] < e for s, e in taken):
                    continue
                taken.append(span)
                found.append(_Mention(span[0], span[1], col))
        found.sort(key=lambda m: m.start)
        return found

    def _group_column(self, mentions: list[_Mention], after: int) -> Optional[str]:
        for mention in mentions:
            if mention.start >= after and not mention.consumed:
                return mention.column
        return None

    # ------------------------------------------------------------- filters

    def _extract_filters(
        self, nl: str, lower: str, table: str, mentions: list[_Mention]
    ) -> list[tuple[int, Expr]]:
        filters: list[tuple[int, Expr]] = []
        for mention in mentions:
            link = _FILTER_LINK.match(lower, mention.end)
            if link is None:
                continue
            value = self._capture_value(nl, link.end())
            if value is None:
                continue
            column = self.schema.column(table, mention.column)
            filters.append((mention.start, _filter_expr(column.name, column.ctype, value)))
            mention.consumed = True

        date_col = self._unique_date_column(table)
        if date_col is not None:
            for match in _DATE_CUE.finditer(lower):
                op = _DATE_OPS[match.group(1)]
                year = match.group(2)
                filters.append(
                    (match.start(), Comparison(op, ColumnRef(date_col), Literal.string(year)))
                )
        filters.sort(key=lambda pair: pair[0])  # NL appearance order
        return filters

    def _capture_value(self, nl: str, position: int) -> Optional[str]:
        quoted = _QUOTED.match(nl, position)
        if quoted:
            return quoted.group(1) or quoted.group(2)
        number = _NUMBER.match(nl, position)
        if number:
            return number.group(0)
        capitalized = _CAP_RUN.match(nl, position)
        if capitalized:
            return capitalized.group(0)
        return None

    def _unique_date_column(self, table: str) -> Optional[str]:
        dates = [c.name for c in self.schema.columns(table) if c.ctype is ColumnType.DATE]
        return dates[0] if len(dates) == 1 else None


def _filter_expr(column: str, ctype: ColumnType, value: str) -> Expr:
    ref = ColumnRef(column)
    if ctype is ColumnType.INT:
        try:
            return Comparison(CompareOp.EQ, ref, Literal.int_(int(value)))
        except ValueError:
            pass
    if ctype is ColumnType.FLOAT:
        try:
            return Comparison(CompareOp.EQ, ref, Literal.float_(float(value)))
        except ValueError:
            pass
    if ctype is ColumnType.DATE:
        return Comparison(CompareOp.EQ, ref, Literal.string(value))
    return Like(ref, Literal.string(f"%{value}%"))


def _combine(filters: list[tuple[int, Expr]]) -> Optional[Expr]:
    exprs = [expr for _, expr in filters]
    if not exprs:
        return None
    if len(exprs) == 1:
        return exprs[0]
    return And(tuple(exprs))
