"""Evaluation harnesses: text-to-SQL EM/EA and checker interception metrics."""

from sqlgate.evaluation.checker_eval import (
    load_injection_corpus,
    run_checker_eval,
    write_checker_report,
    write_roc_points,
)
from sqlgate.evaluation.confusion import (
    CheckerMetrics,
    ConfusionCounts,
    EmptyInput,
    EvaluationError,
    LengthMismatch,
    confusion,
    metrics,
    pairwise_concordance,
    roc_auc,
    roc_curve,
)
from sqlgate.evaluation.nl2sql import (
    ERROR_GOLD,
    ERROR_PRED,
    MATCH,
    MISMATCH,
    EvalRecord,
    EvalReport,
    RecordOutcome,
    exact_match,
    execution_accuracy,
    load_eval_records,
    run_eval,
    run_select,
)

__all__ = [
    "load_injection_corpus", "run_checker_eval", "write_checker_report",
    "write_roc_points", "CheckerMetrics", "ConfusionCounts", "EmptyInput",
    "EvaluationError", "LengthMismatch", "confusion", "metrics",
    "pairwise_concordance", "roc_auc", "roc_curve", "ERROR_GOLD",
    "ERROR_PRED", "MATCH", "MISMATCH", "EvalRecord", "EvalReport",
    "RecordOutcome", "exact_match", "execution_accuracy",
    "load_eval_records", "run_eval", "run_select",
]
