"""The central control unit: NL -> generate -> check -> execute.

The checker is a strict gate: a statement reaches the executor only on an
Ok/Allow verdict, and the executor call counter makes that auditable.
Every request produces a trace (stage timings, chosen backend, verdict,
outcome) which is also appended to the JSON-lines audit log together with
the raw generated SQL.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from pathlib import Path
from typing import Optional

from sqlgate.checker import CheckVerdict, DEFAULT_POLICY, SecurityPolicy, check
from sqlgate.checker.engine import remote_classifier
from sqlgate.errors import SqlgateError
from sqlgate.gateway.config import GatewayConfig
from sqlgate.gateway.registry import (
    HealthProber,
    NodeRegistry,
    NoHealthyBackend,
    probe_health,
)
from sqlgate.generator import (
    GenerationError,
    GenerationRequest,
    GenerationResult,
    NoMatch,
    RemoteBackend,
    TemplateBackend,
)
from sqlgate.sql import parse
from sqlgate.sql.ast import Schema, Select
from sqlgate.storage import TableStore, execute_distributed

REFUSAL_GENERATION = "generation_failed"
REFUSAL_SYNTAX = "syntax_rejected"
REFUSAL_SECURITY = "security_blocked"


class ExecutionStageError(SqlgateError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class GatewayService:
    def __init__(
        self,
        schema: Schema,
        store: TableStore,
        policy: SecurityPolicy = DEFAULT_POLICY,
        synonyms: Optional[dict] = None,
        backend_mode: str = "template",
        remote_endpoints: tuple[str, ...] = (),
        classifier_endpoints: tuple[str, ...] = (),
        audit_log: Optional[Path] = None,
        fail_threshold: int = 3,
        recover_threshold: int = 2,
        probe_interval_s: float = 1.0,
        probe_timeout_s: float = 2.0,
        remote_timeout_s: float = 30.0,
        classifier_timeout_s: float = 10.0,
    ):
        self.schema = schema
        self.store = store
        self.policy = policy
        self.backend_mode = backend_mode
        self.audit_log = Path(audit_log) if audit_log else None
        self.registry = NodeRegistry(fail_threshold, recover_threshold)
        self.template_backend = TemplateBackend(schema, synonyms)
        self.remote_timeout_s = remote_timeout_s
        self.classifier_timeout_s = classifier_timeout_s
        self.executor_calls = 0  # blocked statements must never bump this
        self._audit_lock = threading.Lock()
        self._backends: dict[str, RemoteBackend] = {}

        if backend_mode in ("template", "hybrid"):
            self.registry.add("template", "generator", "local:template", healthy=True)
        for i, endpoint in enumerate(remote_endpoints):
            node_id = f"remote-{i}"
            self.registry.add(node_id, "generator", endpoint)
            self._backends[node_id] = RemoteBackend(endpoint, timeout_s=remote_timeout_s)
        for i, endpoint in enumerate(classifier_endpoints):
            self.registry.add(f"classifier-{i}", "classifier", endpoint)
        for shard_id in range(store.num_shards):
            self.registry.add(
                f"shard-{shard_id}", "shard", f"local:shard/{shard_id}", healthy=True
            )
        self.prober = HealthProber(self.registry, probe_interval_s, probe_timeout_s)

    @classmethod
    def from_config(cls, cfg: GatewayConfig) -> "GatewayService":
        if cfg.schema_path is None:
            raise SqlgateError("config needs a schema path")
        schema = Schema.from_json(json.loads(cfg.schema_path.read_text(encoding="utf-8")))
        synonyms = None
        if cfg.synonyms_path is not None:
            synonyms = json.loads(cfg.synonyms_path.read_text(encoding="utf-8"))
        policy = SecurityPolicy.load(cfg.policy_path) if cfg.policy_path else DEFAULT_POLICY
        store = TableStore(schema, num_shards=cfg.shards)
        for source in cfg.tables:
            table = store.create_table(source.name, key_column=source.key_column)
            if source.csv is not None:
                table.ingest_csv(source.csv)
            if source.jsonl is not None:
                table.ingest_jsonl(source.jsonl)
        return cls(
            schema,
            store,
            policy=policy,
            synonyms=synonyms,
            backend_mode=cfg.backend_mode,
            remote_endpoints=tuple(cfg.remote_endpoints),
            classifier_endpoints=tuple(cfg.classifier_endpoints),
            audit_log=cfg.audit_log,
            fail_threshold=cfg.fail_threshold,
            recover_threshold=cfg.recover_threshold,
            probe_interval_s=cfg.probe_interval_s,
            probe_timeout_s=cfg.probe_timeout_s,
            remote_timeout_s=cfg.remote_timeout_s,
            classifier_timeout_s=cfg.classifier_timeout_s,
        )

    # ------------------------------------------------------------ generation

    def generate(self, nl: str) -> GenerationResult:
        request = GenerationRequest(nl, self.schema)
        if self.backend_mode == "template":
            return self.template_backend.generate(request)
        if self.backend_mode == "hybrid":
            try:
                return self.template_backend.generate(request)
            except NoMatch:
                return self._generate_remote(request)
        return self._generate_remote(request)

    def _generate_remote(self, request: GenerationRequest) -> GenerationResult:
        attempts = max(1, len(self.registry.nodes("generator")))
        last_error: Optional[Exception] = None
        for _ in range(attempts):
            node = self.registry.balance("generator")  # raises NoHealthyBackend
            if node.address == "local:template":
                try:
                    return self.template_backend.generate(request)
                except NoMatch as exc:
                    last_error = exc
                    continue
            backend = self._backends[node.node_id]
            try:
                result = backend.generate(request)
            except GenerationError as exc:
                self.registry.record_failure(node.node_id)
                last_error = exc
                continue
            self.registry.record_success(node.node_id)
            return result
        raise last_error if last_error else NoHealthyBackend("generator")

    # -------------------------------------------------------------- checking

    def classifier(self):
        if not self.registry.nodes("classifier"):
            return None

        def classify(sql: str) -> float:
            node = self.registry.balance("classifier")  # NoHealthyBackend escapes
            try:
                score = remote_classifier(node.address, self.classifier_timeout_s)(sql)
            except SqlgateError:
                self.registry.record_failure(node.node_id)
                raise
            self.registry.record_success(node.node_id)
            return score

        return classify

    def check_sql(self, sql: str) -> CheckVerdict:
        # balance() inside the closure raises when no classifier is healthy;
        # check() treats that as transport failure and degrades to rules-only
        return check(
            sql,
            policy=self.policy,
            known_tables=set(self.schema.table_names()),
            classifier=self.classifier(),
        )

    # ------------------------------------------------------------- execution

    def execute_checked(self, sql: str):
        stmt = parse(sql)
        if not isinstance(stmt, Select):
            raise ExecutionStageError("execute", SqlgateError("only SELECT executes"))
        table = self.store.get(stmt.table)
        self.executor_calls += 1
        return execute_distributed(stmt, table)

    # --------------------------------------------------------------- pipeline

    def handle_query(self, nl: str, options: Optional[dict] = None) -> dict:
        request_id = uuid.uuid4().hex[:12]
        started = time.perf_counter()
        timings: dict[str, float] = {}
        response: dict = {
            "request_id": request_id,
            "sql": None,
            "verdict": None,
            "columns": None,
            "rows": None,
            "reason": None,
        }

        stage_start = time.perf_counter()
        backend_id = None
        try:
            generated = self.generate(nl)
            response["sql"] = generated.sql
            backend_id = generated.backend_id
        except (NoMatch, GenerationError) as exc:
            timings["generate_s"] = time.perf_counter() - stage_start
            response["reason"] = f"{REFUSAL_GENERATION}: {exc}"
            return self._finish(response, nl, backend_id, timings, started, "refused")
        timings["generate_s"] = time.perf_counter() - stage_start
        return self._check_and_execute(
            response, nl, generated.sql, backend_id, timings, started
        )

    def handle_sql(self, sql: str) -> dict:
        """Check-then-execute for operator-edited SQL: the generation stage
        is skipped, the checker gate is not."""
        request_id = uuid.uuid4().hex[:12]
        started = time.perf_counter()
        response: dict = {
            "request_id": request_id,
            "sql": sql,
            "verdict": None,
            "columns": None,
            "rows": None,
            "reason": None,
        }
        return self._check_and_execute(response, None, sql, "edited-sql", {}, started)

    def _check_and_execute(self, response, nl, sql, backend_id, timings, started) -> dict:
        stage_start = time.perf_counter()
        verdict = self.check_sql(sql)
        timings["check_s"] = time.perf_counter() - stage_start
        response["verdict"] = verdict.to_json()

        # a security block outranks the syntax verdict in the refusal reason
        if verdict.security != "allow":
            rules = ",".join(verdict.rule_ids()) or "classifier"
            response["reason"] = f"{REFUSAL_SECURITY}: {rules}"
            return self._finish(response, nl, backend_id, timings, started, "refused")
        if verdict.syntax != "ok":
            response["reason"] = f"{REFUSAL_SYNTAX}: {verdict.syntax_detail}"
            return self._finish(response, nl, backend_id, timings, started, "refused")

        stage_start = time.perf_counter()
        try:
            result = self.execute_checked(sql)
        except SqlgateError as exc:
            timings["execute_s"] = time.perf_counter() - stage_start
            response["reason"] = f"execution_error: {exc}"
            self._finish(response, nl, backend_id, timings, started, "error")
            raise ExecutionStageError("execute", exc) from exc
        timings["execute_s"] = time.perf_counter() - stage_start
        response["columns"] = result.columns
        response["rows"] = [list(row) for row in result.rows]
        return self._finish(response, nl, backend_id, timings, started, "executed")

    def _finish(self, response, nl, backend_id, timings, started, outcome) -> dict:
        timings["total_s"] = time.perf_counter() - started
        verdict = response["verdict"]
        trace = {
            "request_id": response["request_id"],
            "backend": backend_id,
            "timings": timings,
            "outcome": outcome,
            "verdict": verdict["security"] if verdict else None,
            "row_count": len(response["rows"]) if response["rows"] is not None else None,
            "reason": response["reason"],
        }
        response["trace"] = trace
        self._audit(nl, response)
        return response

    def _audit(self, nl: str, response: dict) -> None:
        if self.audit_log is None:
            return
        record = {
            "ts": time.time(),
            "request_id": response["request_id"],
            "nl": nl,
            "sql": response["sql"],
            "outcome": response["trace"]["outcome"],
            "reason": response["reason"],
            "row_count": response["trace"]["row_count"],
            "backend": response["trace"]["backend"],
            "verdict": response["verdict"],
            "timings": response["trace"]["timings"],
        }
        line = json.dumps(record, sort_keys=True)
        with self._audit_lock:
            self.audit_log.parent.mkdir(parents=True, exist_ok=True)
            with open(self.audit_log, "a", encoding="utf-8") as log:
                log.write(line + "\n")

    # ------------------------------------------------------------- lifecycle

    def start(self) -> None:
        self.prober.sweep()  # nodes get an immediate first probe
        self.prober.start()

    def stop(self) -> None:
        self.prober.stop()

    def probe_node(self, node_id: str) -> str:
        return probe_health(self.registry, node_id, self.prober.timeout_s)
