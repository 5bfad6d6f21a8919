"""Interception harness: run the checker over a labeled statement corpus.

Corpus format: delimited text with a header, one statement and one label
per row (label 1 = malicious). Column names are mappable so differently
headed files (e.g. public injection corpora) load after a config tweak.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path
from typing import Callable, Optional

from sqlgate.checker import BLOCK, DEFAULT_POLICY, SecurityPolicy, check
from sqlgate.evaluation.confusion import (
    EvaluationError,
    confusion,
    metrics,
    roc_auc,
)


def load_injection_corpus(
    path: str | Path,
    statement_col: str = "statement",
    label_col: str = "label",
) -> list[tuple[str, bool]]:
    """Rows of (statement, is_malicious). Labels accept 1/0 and
    malicious/benign spellings."""
    rows: list[tuple[str, bool]] = []
    with open(path, newline="", encoding="utf-8", errors="replace") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise EvaluationError(f"{path}: missing header row")
        fields = {name.lower(): name for name in reader.fieldnames}
        try:
            stmt_field = fields[statement_col.lower()]
            label_field = fields[label_col.lower()]
        except KeyError as exc:
            raise EvaluationError(
                f"{path}: header {reader.fieldnames} lacks column {exc}"
            ) from None
        for record in reader:
            statement = record[stmt_field]
            label = str(record[label_field]).strip().lower()
            if statement is None:
                continue
            rows.append((statement, label in ("1", "true", "malicious")))
    if not rows:
        raise EvaluationError(f"{path}: corpus is empty")
    return rows


def run_checker_eval(
    corpus: list[tuple[str, bool]],
    policy: SecurityPolicy = DEFAULT_POLICY,
    known_tables: Optional[set] = None,
    classifier: Optional[Callable[[str], float]] = None,
    keep_statements: bool = True,
) -> dict:
    """Check every statement; aggregate confusion counts, ratio metrics,
    and the score ROC. Returns the report as a JSON-ready dict."""
    started = time.perf_counter()
    labels: list[str] = []
    verdicts: list[str] = []
    scores: list[float] = []
    per_statement: list[dict] = []
    for statement, malicious in corpus:
        verdict = check(statement, policy, known_tables, classifier)
        labels.append("malicious" if malicious else "benign")
        verdicts.append(verdict.security)
        scores.append(verdict.score)
        entry = {
            "label": labels[-1],
            "verdict": verdict.security,
            "score": verdict.score,
            "rules": verdict.rule_ids(),
            "syntax": verdict.syntax,
        }
        if keep_statements:
            entry["statement"] = statement
        per_statement.append(entry)

    counts = confusion(labels, verdicts)
    ratios = metrics(counts)
    report = {
        "size": len(corpus),
        "policy": policy.to_json(),
        "classifier_configured": classifier is not None,
        "counts": counts.to_json(),
        "metrics": ratios.display(places=4),
        "blocked": sum(1 for v in verdicts if v == BLOCK),
        "elapsed_s": time.perf_counter() - started,
        "statements": per_statement,
    }
    try:
        points, auc = roc_auc(scores, labels)
        report["roc"] = {"points": points, "auc": auc}
    except EvaluationError:
        report["roc"] = None  # single-class corpus: curve undefined
    return report


def write_checker_report(report: dict, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_roc_points(report: dict, path: str | Path) -> None:
    """ROC points as delimited text for external plotting."""
    lines = ["fpr\ttpr"]
    if report.get("roc"):
        lines += [f"{x}\t{y}" for x, y in report["roc"]["points"]]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
