"""Gateway: pipeline service, node registry, HTTP front."""

from sqlgate.gateway.config import BACKEND_MODES, ConfigError, GatewayConfig, TableSource, load_config
from sqlgate.gateway.http import GatewayHTTPServer, serve_from_config
from sqlgate.gateway.pipeline import (
    ExecutionStageError,
    GatewayService,
    REFUSAL_GENERATION,
    REFUSAL_SECURITY,
    REFUSAL_SYNTAX,
)
from sqlgate.gateway.registry import (
    HEALTHY,
    HealthProber,
    NEW,
    Node,
    NodeRegistry,
    NoHealthyBackend,
    UNHEALTHY,
    probe_health,
    probe_once,
)

__all__ = [
    "BACKEND_MODES", "ConfigError", "GatewayConfig", "TableSource",
    "load_config", "GatewayHTTPServer", "serve_from_config",
    "ExecutionStageError", "GatewayService", "REFUSAL_GENERATION",
    "REFUSAL_SECURITY", "REFUSAL_SYNTAX", "HEALTHY", "HealthProber", "NEW",
    "Node", "NodeRegistry", "NoHealthyBackend", "UNHEALTHY", "probe_health",
    "probe_once",
]
