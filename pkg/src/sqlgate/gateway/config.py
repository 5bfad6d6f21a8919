"""Gateway configuration: JSON file with env overrides.

Relative paths resolve against the config file's directory, so the bundle
works from any working directory. Env overrides: SQLGATE_LISTEN,
SQLGATE_REMOTE_ENDPOINTS and SQLGATE_CLASSIFIER_ENDPOINTS (comma
separated).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from sqlgate.errors import SqlgateError

BACKEND_MODES = ("template", "remote", "hybrid")  # hybrid: template first, remote fallback


class ConfigError(SqlgateError):
    pass


@dataclass
class TableSource:
    name: str
    key_column: str
    csv: Optional[Path] = None
    jsonl: Optional[Path] = None


@dataclass
class GatewayConfig:
    host: str = "127.0.0.1"
    port: int = 8765
    backend_mode: str = "template"
    remote_endpoints: list[str] = field(default_factory=list)
    classifier_endpoints: list[str] = field(default_factory=list)
    schema_path: Optional[Path] = None
    synonyms_path: Optional[Path] = None
    policy_path: Optional[Path] = None
    shards: int = 3
    tables: list[TableSource] = field(default_factory=list)
    static_dir: Optional[Path] = None
    audit_log: Optional[Path] = None
    probe_interval_s: float = 1.0
    probe_timeout_s: float = 2.0
    fail_threshold: int = 3
    recover_threshold: int = 2
    remote_timeout_s: float = 30.0
    classifier_timeout_s: float = 10.0


def _parse_listen(listen: str) -> tuple[str, int]:
    try:
        host, port_text = listen.rsplit(":", 1)
        return host, int(port_text)
    except ValueError:
        raise ConfigError(f"listen must be host:port, got {listen!r}") from None


def load_config(path: str | Path) -> GatewayConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from None
    base = path.parent

    def resolve(name: str) -> Optional[Path]:
        value = doc.get(name)
        if value is None:
            return None
        candidate = Path(value)
        return candidate if candidate.is_absolute() else base / candidate

    listen = os.environ.get("SQLGATE_LISTEN", doc.get("listen", "127.0.0.1:8765"))
    host, port = _parse_listen(listen)

    mode = doc.get("backend_mode", "template")
    if mode not in BACKEND_MODES:
        raise ConfigError(f"backend_mode must be one of {BACKEND_MODES}, got {mode!r}")

    remote = doc.get("remote_endpoints", [])
    env_remote = os.environ.get("SQLGATE_REMOTE_ENDPOINTS")
    if env_remote is not None:
        remote = [e.strip() for e in env_remote.split(",") if e.strip()]
    classifiers = doc.get("classifier_endpoints", [])
    env_classifiers = os.environ.get("SQLGATE_CLASSIFIER_ENDPOINTS")
    if env_classifiers is not None:
        classifiers = [e.strip() for e in env_classifiers.split(",") if e.strip()]

    tables = []
    for entry in doc.get("tables", []):
        csv_path = entry.get("csv")
        jsonl_path = entry.get("jsonl")
        tables.append(
            TableSource(
                name=entry["name"],
                key_column=entry["key"],
                csv=(base / csv_path if csv_path and not Path(csv_path).is_absolute() else Path(csv_path) if csv_path else None),
                jsonl=(base / jsonl_path if jsonl_path and not Path(jsonl_path).is_absolute() else Path(jsonl_path) if jsonl_path else None),
            )
        )

    return GatewayConfig(
        host=host,
        port=port,
        backend_mode=mode,
        remote_endpoints=list(remote),
        classifier_endpoints=list(classifiers),
        schema_path=resolve("schema"),
        synonyms_path=resolve("synonyms"),
        policy_path=resolve("policy"),
        shards=doc.get("shards", 3),
        tables=tables,
        static_dir=resolve("static_dir"),
        audit_log=resolve("audit_log"),
        probe_interval_s=doc.get("probe_interval_s", 1.0),
        probe_timeout_s=doc.get("probe_timeout_s", 2.0),
        fail_threshold=doc.get("fail_threshold", 3),
        recover_threshold=doc.get("recover_threshold", 2),
        remote_timeout_s=doc.get("remote_timeout_s", 30.0),
        classifier_timeout_s=doc.get("classifier_timeout_s", 10.0),
    )
