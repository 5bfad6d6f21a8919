"""Security policy: enabled rules, classifier threshold, class allow-list."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from sqlgate.errors import SqlgateError

ALL_RULES = ("R1", "R2", "R3", "R4", "R5", "R6", "R7")

#: tables probed for credentials/metadata; a UNION tail that names one of
#: these is hostile regardless of what schema is registered
SYSTEM_TABLES = frozenset(
    """
    sqlite_master sqlite_schema pg_shadow pg_user pg_catalog all_tables
    all_users dual sysobjects syscolumns systables information_schema
    mysql_user msysobjects
    """.split()
)


class PolicyError(SqlgateError):
    pass


@dataclass(frozen=True)
class SecurityPolicy:
    rules: frozenset = frozenset(ALL_RULES)
    threshold: float = 0.5
    allow_classes: frozenset = frozenset({"select"})
    allow_writes: bool = False

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise PolicyError(f"threshold {self.threshold} outside [0, 1]")
        if not self.allow_classes:
            raise PolicyError("class allow-list must be non-empty")
        unknown = set(self.rules) - set(ALL_RULES)
        if unknown:
            raise PolicyError(f"unknown rule ids: {sorted(unknown)}")

    def allowed_classes(self) -> frozenset:
        if self.allow_writes:
            return self.allow_classes | {"insert", "update", "delete"}
        return self.allow_classes

    def to_json(self) -> dict:
        return {
            "rules": sorted(self.rules),
            "threshold": self.threshold,
            "allow_classes": sorted(self.allow_classes),
            "allow_writes": self.allow_writes,
        }

    @staticmethod
    def from_json(doc: dict) -> "SecurityPolicy":
        return SecurityPolicy(
            rules=frozenset(doc.get("rules", ALL_RULES)),
            threshold=doc.get("threshold", 0.5),
            allow_classes=frozenset(
                cls.lower() for cls in doc.get("allow_classes", ["select"])
            ),
            allow_writes=doc.get("allow_writes", False),
        )

    @staticmethod
    def load(path: str | Path) -> "SecurityPolicy":
        return SecurityPolicy.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


DEFAULT_POLICY = SecurityPolicy()
