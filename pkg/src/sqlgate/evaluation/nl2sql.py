"""Text-to-SQL scoring: exact match and execution accuracy.

Exact match is whole-statement normalized-AST equality, stricter than
component-set scoring; it is therefore not comparable with leaderboard
numbers computed the other way. Execution accuracy compares result rows on
the reference store: as sequences when the gold query orders, as multisets
otherwise.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from sqlgate.errors import SqlgateError
from sqlgate.evaluation.confusion import EmptyInput
from sqlgate.generator.base import Backend, GenerationRequest
from sqlgate.sql import normalize, parse
from sqlgate.sql.ast import Select
from sqlgate.storage import ResultSet, TableStore, execute_distributed

MATCH = "match"
MISMATCH = "mismatch"
ERROR_GOLD = "error:gold"
ERROR_PRED = "error:pred"


def exact_match(gold: str, pred: str) -> bool:
    """normalize(parse(gold)) == normalize(parse(pred)); unparseable input
    yields False, never an exception."""
    try:
        return normalize(parse(gold)) == normalize(parse(pred))
    except SqlgateError:
        return False


def run_select(store: TableStore, sql: str) -> ResultSet:
    stmt = parse(sql)
    if not isinstance(stmt, Select):
        raise SqlgateError(f"only SELECT is executable, got {type(stmt).__name__}")
    return execute_distributed(stmt, store.get(stmt.table))


def execution_accuracy(gold: str, pred: str, store: TableStore) -> str:
    """match | mismatch | error:gold | error:pred."""
    try:
        gold_stmt = parse(gold)
        gold_result = run_select(store, gold)
    except SqlgateError:
        return ERROR_GOLD
    try:
        pred_result = run_select(store, pred)
    except SqlgateError:
        return ERROR_PRED
    if len(gold_result.columns) != len(pred_result.columns):
        return MISMATCH
    ordered = bool(getattr(gold_stmt, "order_by", ()))
    if ordered:
        return MATCH if gold_result.rows == pred_result.rows else MISMATCH
    return MATCH if Counter(gold_result.rows) == Counter(pred_result.rows) else MISMATCH


# ------------------------------------------------------------------ harness


@dataclass(frozen=True)
class EvalRecord:
    question: str
    gold_sql: str
    db_id: Optional[str] = None


@dataclass
class RecordOutcome:
    index: int
    question: str
    gold_sql: str
    pred_sql: Optional[str]
    em: bool
    ea: str
    skipped: Optional[str] = None  # reason, when the record was not scored

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "question": self.question,
            "gold_sql": self.gold_sql,
            "pred_sql": self.pred_sql,
            "em": self.em,
            "ea": self.ea,
            "skipped": self.skipped,
        }


@dataclass
class EvalReport:
    dataset: str
    backend_id: str
    total: int
    evaluated: int
    skipped: int
    em_count: int
    ea_count: int
    outcomes: list[RecordOutcome] = field(default_factory=list)
    elapsed_s: float = 0.0

    @property
    def em_rate(self) -> float:
        return self.em_count / self.evaluated if self.evaluated else 0.0

    @property
    def ea_rate(self) -> float:
        return self.ea_count / self.evaluated if self.evaluated else 0.0

    def to_json(self) -> dict:
        return {
            "dataset": self.dataset,
            "backend": self.backend_id,
            "total": self.total,
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "em_count": self.em_count,
            "ea_count": self.ea_count,
            "em_rate": self.em_rate,
            "ea_rate": self.ea_rate,
            "elapsed_s": self.elapsed_s,
            "records": [outcome.to_json() for outcome in self.outcomes],
        }


def load_eval_records(path: str | Path) -> list[EvalRecord]:
    """JSON-lines records: {"question", "gold_sql"|"query", "db_id"?}."""
    records = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        gold = doc.get("gold_sql", doc.get("query"))
        records.append(EvalRecord(doc["question"], gold, doc.get("db_id")))
    return records


def run_eval(
    dataset: str | Path | list[EvalRecord],
    backend: Backend,
    store: TableStore,
    report_path: Optional[str | Path] = None,
    log_path: Optional[str | Path] = None,
) -> EvalReport:
    """Stream records, score EM and EA, aggregate, optionally write the
    JSON report and a per-record JSON-lines log."""
    started = time.perf_counter()
    if isinstance(dataset, (str, Path)):
        records = load_eval_records(dataset)
        dataset_name = str(dataset)
    else:
        records = dataset
        dataset_name = "<in-memory>"
    if not records:
        raise EmptyInput("evaluation dataset is empty")

    outcomes: list[RecordOutcome] = []
    evaluated = skipped = em_count = ea_count = 0
    for index, record in enumerate(records):
        skip_reason = None
        try:
            parse(record.gold_sql)
        except SqlgateError as exc:
            skip_reason = f"gold does not parse: {exc}"
        if skip_reason is None:
            try:
                run_select(store, record.gold_sql)
            except SqlgateError as exc:
                skip_reason = f"gold does not execute: {exc}"
        if skip_reason is not None:
            skipped += 1
            outcomes.append(
                RecordOutcome(index, record.question, record.gold_sql, None, False, ERROR_GOLD, skip_reason)
            )
            continue

        pred_sql: Optional[str] = None
        try:
            pred_sql = backend.generate(
                GenerationRequest(record.question, store.schema)
            ).sql
        except SqlgateError:
            pred_sql = None

        if pred_sql is None:
            em, ea = False, ERROR_PRED
        else:
            em = exact_match(record.gold_sql, pred_sql)
            ea = execution_accuracy(record.gold_sql, pred_sql, store)
        evaluated += 1
        em_count += em
        ea_count += ea == MATCH
        outcomes.append(RecordOutcome(index, record.question, record.gold_sql, pred_sql, em, ea))

    report = EvalReport(
        dataset=dataset_name,
        backend_id=getattr(backend, "backend_id", "?"),
        total=len(records),
        evaluated=evaluated,
        skipped=skipped,
        em_count=em_count,
        ea_count=ea_count,
        outcomes=outcomes,
        elapsed_s=time.perf_counter() - started,
    )
    if report_path is not None:
        Path(report_path).write_text(
            json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    if log_path is not None:
        with open(log_path, "w", encoding="utf-8") as log:
            for outcome in outcomes:
                log.write(json.dumps(outcome.to_json(), sort_keys=True) + "\n")
    return report
