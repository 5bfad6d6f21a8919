"""Syntax validation and injection screening."""

from sqlgate.checker.engine import (
    ALLOW,
    BLOCK,
    SYNTAX_ERROR,
    SYNTAX_OK,
    SYNTAX_UNSUPPORTED,
    CheckVerdict,
    ClassifierUnparseable,
    check,
    check_security,
    check_syntax,
    classify_remote,
    parse_classifier_reply,
    remote_classifier,
)
from sqlgate.checker.policy import ALL_RULES, DEFAULT_POLICY, SecurityPolicy, SYSTEM_TABLES
from sqlgate.checker.rules import RULE_SCORES, RuleHit, has_dangling_quote_region

__all__ = [
    "ALLOW", "BLOCK", "SYNTAX_ERROR", "SYNTAX_OK", "SYNTAX_UNSUPPORTED",
    "CheckVerdict", "ClassifierUnparseable", "check", "check_security",
    "check_syntax", "classify_remote", "parse_classifier_reply",
    "remote_classifier", "ALL_RULES", "DEFAULT_POLICY", "SecurityPolicy",
    "SYSTEM_TABLES", "RULE_SCORES", "RuleHit", "has_dangling_quote_region",
]
