"""Two-stage guard: parser-backed syntax validation, then security
screening by the rule engine with an optional remote classifier score.

Verdict semantics: Block iff an enabled rule fires, the statement class
falls outside the policy allow-list, or a configured classifier scores at
or above the policy threshold. Classifier transport failures degrade to
rules-only verdicts with classifier_used=False.
"""

from __future__ import annotations

import importlib.resources
import json
import socket
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from sqlgate.errors import SqlgateError
from sqlgate.checker.policy import SecurityPolicy, DEFAULT_POLICY
from sqlgate.checker.rules import (
    RuleHit,
    rule_r1_tautology,
    rule_r2_stacked_write,
    rule_r3_comment_truncation,
    rule_r4_union_probe,
    rule_r5_unguarded_write,
    rule_r6_obfuscation,
    rule_r7_injection_residue,
)
from sqlgate.sql import parse, print_sql
from sqlgate.sql.ast import Statement, statement_class
from sqlgate.sql.errors import LexError, SqlSyntaxError, UnsupportedFeature
from sqlgate.sql.tokens import Token, tokenize

SYNTAX_OK = "ok"
SYNTAX_ERROR = "syntax_error"
SYNTAX_UNSUPPORTED = "unsupported"

ALLOW = "allow"
BLOCK = "block"


class ClassifierUnparseable(SqlgateError):
    pass


@dataclass
class CheckVerdict:
    syntax: str  # ok | syntax_error | unsupported
    syntax_detail: Optional[str]
    security: str  # allow | block
    rule_hits: list[RuleHit] = field(default_factory=list)
    score: float = 0.0
    classifier_used: bool = False
    elapsed_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.syntax == SYNTAX_OK and self.security == ALLOW

    def rule_ids(self) -> list[str]:
        return sorted({hit.rule for hit in self.rule_hits})

    def to_json(self) -> dict:
        return {
            "syntax": {"status": self.syntax, "detail": self.syntax_detail},
            "security": self.security,
            "rule_hits": [hit.to_json() for hit in self.rule_hits],
            "score": self.score,
            "classifier_used": self.classifier_used,
            "elapsed_s": self.elapsed_s,
        }


def check_syntax(sql: str) -> tuple[str, Optional[str]]:
    """(status, detail): delegates to the parser; never raises."""
    try:
        parse(sql)
        return SYNTAX_OK, None
    except UnsupportedFeature as exc:
        return SYNTAX_UNSUPPORTED, exc.feature
    except (SqlSyntaxError, LexError) as exc:
        return SYNTAX_ERROR, str(exc)


def check_security(
    sql: Union[str, Statement],
    policy: SecurityPolicy = DEFAULT_POLICY,
    known_tables: Optional[set] = None,
    classifier: Optional[Callable[[str], float]] = None,
) -> CheckVerdict:
    """Security screening of raw text or a pre-parsed statement.

    Raw text is accepted because some injections are deliberately
    unparseable; token- and text-level rules still apply to them.
    """
    started = time.perf_counter()
    if isinstance(sql, str):
        text = sql
        tokens, stmt, syntax, syntax_detail = _lex_and_parse(text)
    else:
        stmt = sql
        text = print_sql(stmt)
        tokens = tokenize(text)
        syntax, syntax_detail = SYNTAX_OK, None

    hits: list[RuleHit] = []
    enabled = policy.rules
    if stmt is not None:
        if "R1" in enabled:
            hits += rule_r1_tautology(stmt, text)
        if "R2" in enabled:
            hits += rule_r2_stacked_write(stmt, text)
        if "R4" in enabled:
            hits += rule_r4_union_probe(stmt, text, known_tables)
        if "R5" in enabled:
            hits += rule_r5_unguarded_write(stmt, text)
        if statement_class(stmt) not in policy.allowed_classes():
            hits.append(RuleHit("policy", statement_class(stmt), 0, 0))
    if tokens is not None:
        if "R3" in enabled:
            hits += rule_r3_comment_truncation(tokens)
        if "R6" in enabled:
            hits += rule_r6_obfuscation(tokens)
    if "R7" in enabled:
        hits += rule_r7_injection_residue(text, syntax != SYNTAX_OK)

    score = max((hit.score for hit in hits), default=0.0)
    classifier_used = False
    classifier_score = 0.0
    if classifier is not None:
        try:
            classifier_score = classifier(text)
            classifier_used = True
            score = max(score, classifier_score)
        except SqlgateError:
            classifier_used = False  # degrade to rules-only

    blocked = bool(hits) or (classifier_used and classifier_score >= policy.threshold)
    return CheckVerdict(
        syntax=syntax,
        syntax_detail=syntax_detail,
        security=BLOCK if blocked else ALLOW,
        rule_hits=hits,
        score=score,
        classifier_used=classifier_used,
        elapsed_s=time.perf_counter() - started,
    )


def check(
    sql: str,
    policy: SecurityPolicy = DEFAULT_POLICY,
    known_tables: Optional[set] = None,
    classifier: Optional[Callable[[str], float]] = None,
) -> CheckVerdict:
    """Full verdict for raw SQL text: syntax component plus security."""
    return check_security(sql, policy, known_tables, classifier)


def _lex_and_parse(text: str):
    tokens: Optional[list[Token]] = None
    stmt: Optional[Statement] = None
    syntax, detail = SYNTAX_OK, None
    try:
        tokens = tokenize(text)
    except LexError as exc:
        syntax, detail = SYNTAX_ERROR, str(exc)
    if tokens is not None:
        try:
            stmt = parse(tokens)
        except UnsupportedFeature as exc:
            syntax, detail = SYNTAX_UNSUPPORTED, exc.feature
        except SqlgateError as exc:
            syntax, detail = SYNTAX_ERROR, str(exc)
    return tokens, stmt, syntax, detail


# ------------------------------------------------------------- classifier


def classifier_prompt(sql: str) -> str:
    template = (
        importlib.resources.files("sqlgate")
        .joinpath("assets/classifier_prompt.txt")
        .read_text(encoding="utf-8")
    )
    return template.replace("{sql}", sql)


def parse_classifier_reply(text: str) -> float:
    """Map a classification reply to a score in [0, 1]."""
    head = text.strip().split()
    token = head[0].strip(".,:;!\"'").lower() if head else ""
    if token == "malicious":
        return 1.0
    if token == "benign":
        return 0.0
    try:
        value = float(token)
    except ValueError:
        raise ClassifierUnparseable(f"cannot interpret reply {text!r}") from None
    return min(1.0, max(0.0, value))


def classify_remote(sql: str, endpoint: str, timeout_s: float = 10.0) -> float:
    """Score one statement via the completion protocol; [0, 1]."""
    from sqlgate.generator.base import BackendTimeout, BackendUnreachable

    body = json.dumps(
        {"prompt": classifier_prompt(sql), "max_tokens": 8, "temperature": 0.0}
    ).encode("utf-8")
    request = urllib.request.Request(
        endpoint, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout_s) as response:
            payload = json.loads(response.read().decode("utf-8"))
    except socket.timeout as exc:
        raise BackendTimeout(f"{endpoint}: classifier timeout") from exc
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, socket.timeout):
            raise BackendTimeout(f"{endpoint}: classifier timeout") from exc
        raise BackendUnreachable(f"{endpoint}: {exc.reason}") from exc
    except (ConnectionError, OSError, json.JSONDecodeError) as exc:
        raise BackendUnreachable(f"{endpoint}: {exc}") from exc
    return parse_classifier_reply(str(payload.get("text", "")))


def remote_classifier(endpoint: str, timeout_s: float = 10.0) -> Callable[[str], float]:
    """Adapter: bind an endpoint into the check_security classifier slot."""

    def classify(sql: str) -> float:
        return classify_remote(sql, endpoint, timeout_s=timeout_s)

    return classify
