"""Checker interception metrics.

Positive class = malicious, predicted positive = Block. Ratios are exact
Fractions rounded to four decimals only for display; denominator-less
metrics report as None (never 0), so small corpora stay honest.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
from typing import Optional, Sequence

from sqlgate.errors import SqlgateError

_POSITIVE_LABELS = {"malicious", "1", "true", "positive"}
_NEGATIVE_LABELS = {"benign", "0", "false", "negative"}
_BLOCK_VALUES = {"block", "blocked", "1", "true"}
_ALLOW_VALUES = {"allow", "allowed", "0", "false"}


class EvaluationError(SqlgateError):
    pass


class LengthMismatch(EvaluationError):
    pass


class EmptyInput(EvaluationError):
    pass


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise EvaluationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class CheckerMetrics:
    precision: Optional[Fraction]
    recall: Optional[Fraction]
    escape: Optional[Fraction]
    misintercept: Optional[Fraction]

    def display(self, places: int = 4) -> dict[str, Optional[float]]:
        """Exact ratios rounded (half-up) to ``places`` decimals."""
        quantum = Decimal(1).scaleb(-places)

        def rounded(value: Optional[Fraction]) -> Optional[float]:
            if value is None:
                return None
            exact = Decimal(value.numerator) / Decimal(value.denominator)
            return float(exact.quantize(quantum, rounding=ROUND_HALF_UP))

        return {
            "precision": rounded(self.precision),
            "recall": rounded(self.recall),
            "escape": rounded(self.escape),
            "misintercept": rounded(self.misintercept),
        }


def _as_positive(label: object) -> bool:
    text = str(label).strip().lower()
    if text in _POSITIVE_LABELS:
        return True
    if text in _NEGATIVE_LABELS:
        return False
    raise EvaluationError(f"unknown label {label!r}")


def _as_block(verdict: object) -> bool:
    text = str(verdict).strip().lower()
    if text in _BLOCK_VALUES:
        return True
    if text in _ALLOW_VALUES:
        return False
    raise EvaluationError(f"unknown verdict {verdict!r}")


def confusion(labels: Sequence, verdicts: Sequence) -> ConfusionCounts:
    """Tally TP/FP/FN/TN from malicious|benign labels and Block|Allow verdicts."""
    if len(labels) != len(verdicts):
        raise LengthMismatch(f"{len(labels)} labels vs {len(verdicts)} verdicts")
    if not labels:
        raise EmptyInput("nothing to score")
    tp = fp = fn = tn = 0
    for label, verdict in zip(labels, verdicts):
        positive = _as_positive(label)
        blocked = _as_block(verdict)
        if positive and blocked:
            tp += 1
        elif positive:
            fn += 1
        elif blocked:
            fp += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, fn, tn)


def metrics(counts: ConfusionCounts) -> CheckerMetrics:
    """precision TP/(TP+FP), recall TP/(TP+FN), escape FN/(TP+FN),
    misintercept FP/(TN+FP); undefined denominators report None."""
    if counts.total == 0:
        raise EmptyInput("confusion counts are all zero")

    def ratio(num: int, den: int) -> Optional[Fraction]:
        return Fraction(num, den) if den > 0 else None

    return CheckerMetrics(
        precision=ratio(counts.tp, counts.tp + counts.fp),
        recall=ratio(counts.tp, counts.tp + counts.fn),
        escape=ratio(counts.fn, counts.tp + counts.fn),
        misintercept=ratio(counts.fp, counts.tn + counts.fp),
    )


def roc_curve(scores: Sequence[float], labels: Sequence) -> list[tuple[float, float]]:
    """(FPR, TPR) staircase from a threshold sweep over distinct scores."""
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    flags = [_as_positive(label) for label in labels]
    positives = sum(flags)
    negatives = len(flags) - positives
    if positives == 0 or negatives == 0:
        raise EvaluationError("ROC needs at least one positive and one negative")
    points: list[tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(0))]
    for threshold in sorted(set(scores), reverse=True):
        tp = sum(1 for s, pos in zip(scores, flags) if pos and s >= threshold)
        fp = sum(1 for s, pos in zip(scores, flags) if not pos and s >= threshold)
        points.append((Fraction(fp, negatives), Fraction(tp, positives)))
    if points[-1] != (Fraction(1), Fraction(1)):
        points.append((Fraction(1), Fraction(1)))
    return [(float(x), float(y)) for x, y in points]


def roc_auc(scores: Sequence[float], labels: Sequence) -> tuple[list[tuple[float, float]], float]:
    """ROC points plus trapezoid AUC (equals pairwise concordance with
    ties counted one half)."""
    if len(scores) != len(labels):
        raise LengthMismatch(f"{len(scores)} scores vs {len(labels)} labels")
    flags = [_as_positive(label) for label in labels]
    positives = sum(flags)
    negatives = len(flags) - positives
    if positives == 0 or negatives == 0:
        raise EvaluationError("AUC needs at least one positive and one negative")
    exact_points: list[tuple[Fraction, Fraction]] = [(Fraction(0), Fraction(0))]
    for threshold in sorted(set(scores), reverse=True):
        tp = sum(1 for s, pos in zip(scores, flags) if pos and s >= threshold)
        fp = sum(1 for s, pos in zip(scores, flags) if not pos and s >= threshold)
        exact_points.append((Fraction(fp, negatives), Fraction(tp, positives)))
    if exact_points[-1] != (Fraction(1), Fraction(1)):
        exact_points.append((Fraction(1), Fraction(1)))
    auc = Fraction(0)
    for (x0, y0), (x1, y1) in zip(exact_points, exact_points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2
    points = [(float(x), float(y)) for x, y in exact_points]
    return points, float(auc)


def pairwise_concordance(scores: Sequence[float], labels: Sequence) -> float:
    """Brute-force oracle: P(score_pos > score_neg) with ties as 1/2."""
    flags = [_as_positive(label) for label in labels]
    pos = [s for s, f in zip(scores, flags) if f]
    neg = [s for s, f in zip(scores, flags) if not f]
    if not pos or not neg:
        raise EvaluationError("concordance needs both classes")
    total = Fraction(0)
    for p in pos:
        for n in neg:
            if p > n:
                total += 1
            elif p == n:
                total += Fraction(1, 2)
    return float(total / (len(pos) * len(neg)))
