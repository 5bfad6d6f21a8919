"""HTTP front of the gateway.

  POST /api/query    {"nl": ...}  -> {sql, verdict, rows|reason, trace}
  POST /api/generate {"nl": ...}  -> {sql, backend, prompt, elapsed_s}
  POST /api/check    {"sql": ...} -> verdict JSON
  GET  /health                    -> {"status": "ok"}
  GET  /api/schema                -> registered schema
  GET  /api/nodes                 -> node registry snapshot
  GET  /...                       -> static console assets, when configured

Refusals are successful pipeline outcomes (HTTP 200 with a reason);
infrastructure faults map to 5xx, bad requests to 400.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional

from sqlgate.errors import SqlgateError
from sqlgate.gateway.pipeline import ExecutionStageError, GatewayService
from sqlgate.gateway.registry import NoHealthyBackend
from sqlgate.generator import GenerationError


class GatewayHTTPServer:
    def __init__(
        self,
        service: GatewayService,
        host: str = "127.0.0.1",
        port: int = 0,
        static_dir: Optional[Path] = None,
    ):
        self.service = service
        self.static_dir = Path(static_dir).resolve() if static_dir else None
        handler = _build_handler(service, self.static_dir)
        self.server = ThreadingHTTPServer((host, port), handler)
        self._thread: Optional[threading.Thread] = None

    @property
    def address(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> None:
        self.service.start()
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self._thread.start()

    def serve_forever(self) -> None:
        self.service.start()
        try:
            self.server.serve_forever()
        finally:
            self.service.stop()

    def stop(self) -> None:
        self.server.shutdown()
        self.server.server_close()
        self.service.stop()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None


def _build_handler(service: GatewayService, static_dir: Optional[Path]):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):
            pass

        # ------------------------------------------------------------ utils

        def _json(self, code: int, payload: dict) -> None:
            body = json.dumps(payload).encode("utf-8")
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _read_json(self) -> Optional[dict]:
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length)
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError:
                self._json(400, {"error": "request body must be JSON"})
                return None
            if not isinstance(doc, dict):
                self._json(400, {"error": "request body must be a JSON object"})
                return None
            return doc

        def _field(self, doc: dict, name: str) -> Optional[str]:
            value = doc.get(name)
            if not isinstance(value, str) or not value.strip():
                self._json(400, {"error": f"field {name!r} must be a non-empty string"})
                return None
            return value

        # ------------------------------------------------------------ routes

        def do_GET(self):
            if self.path == "/health":
                self._json(200, {"status": "ok"})
            elif self.path == "/api/schema":
                self._json(200, service.schema.to_json())
            elif self.path == "/api/nodes":
                self._json(200, {"nodes": service.registry.to_json()})
            else:
                self._static()

        def do_POST(self):
            doc = self._read_json()
            if doc is None:
                return
            try:
                if self.path == "/api/query":
                    if "sql" in doc and "nl" not in doc:
                        sql = self._field(doc, "sql")  # edited-SQL path, still checked
                        if sql is not None:
                            self._json(200, service.handle_sql(sql))
                    else:
                        nl = self._field(doc, "nl")
                        if nl is not None:
                            self._json(200, service.handle_query(nl, doc.get("options")))
                elif self.path == "/api/generate":
                    nl = self._field(doc, "nl")
                    if nl is not None:
                        result = service.generate(nl)
                        self._json(
                            200,
                            {
                                "sql": result.sql,
                                "backend": result.backend_id,
                                "prompt": result.prompt,
                                "elapsed_s": result.elapsed_s,
                            },
                        )
                elif self.path == "/api/check":
                    sql = self._field(doc, "sql")
                    if sql is not None:
                        self._json(200, service.check_sql(sql).to_json())
                else:
                    self._json(404, {"error": f"no such endpoint {self.path}"})
            except NoHealthyBackend as exc:
                self._json(503, {"error": str(exc), "stage": "generate"})
            except ExecutionStageError as exc:
                self._json(500, {"error": str(exc.cause), "stage": exc.stage})
            except GenerationError as exc:
                self._json(502, {"error": str(exc), "stage": "generate"})
            except SqlgateError as exc:
                self._json(400, {"error": str(exc)})

        # ------------------------------------------------------------ static

        def _static(self):
            if static_dir is None:
                self._json(404, {"error": "no console assets configured"})
                return
            raw = self.path.split("?", 1)[0]
            relative = raw.lstrip("/") or "index.html"
            target = (static_dir / relative).resolve()
            if not str(target).startswith(str(static_dir)) or not target.is_file():
                self._json(404, {"error": f"no such asset {raw!r}"})
                return
            ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            body = target.read_bytes()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler


def serve_from_config(config_path: str | Path) -> GatewayHTTPServer:
    """Build service + HTTP server from a config file (does not start it)."""
    from sqlgate.gateway.config import load_config
    from sqlgate.gateway.pipeline import GatewayService

    cfg = load_config(config_path)
    service = GatewayService.from_config(cfg)
    return GatewayHTTPServer(service, cfg.host, cfg.port, cfg.static_dir)
