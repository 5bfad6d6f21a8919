"""Node registry with F/S health transitions and round-robin balancing.

A node turns Unhealthy after F consecutive probe failures and Healthy
again after S consecutive successes (fresh nodes go Healthy on their first
success). The balancer only ever hands out Healthy nodes.
"""

from __future__ import annotations

import threading
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Optional

from sqlgate.errors import SqlgateError

NEW = "new"
HEALTHY = "healthy"
UNHEALTHY = "unhealthy"

ROLES = ("generator", "classifier", "shard", "ui")


class GatewayError(SqlgateError):
    pass


class NoHealthyBackend(GatewayError):
    def __init__(self, role: str):
        super().__init__(f"no healthy {role} node available")
        self.role = role


class UnknownNode(GatewayError):
    pass


@dataclass
class Node:
    node_id: str
    role: str
    address: str  # http endpoint, or local:<name> for in-process workers
    health: str = NEW
    consecutive_failures: int = 0
    consecutive_successes: int = 0
    unhealthy_since: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "id": self.node_id,
            "role": self.role,
            "address": self.address,
            "health": self.health,
            "consecutive_failures": self.consecutive_failures,
            "consecutive_successes": self.consecutive_successes,
            "unhealthy_since": self.unhealthy_since,
        }


class NodeRegistry:
    def __init__(self, fail_threshold: int = 3, recover_threshold: int = 2):
        if fail_threshold < 1 or recover_threshold < 1:
            raise GatewayError("health thresholds must be >= 1")
        self.fail_threshold = fail_threshold
        self.recover_threshold = recover_threshold
        self._nodes: dict[str, Node] = {}
        self._order: list[str] = []
        self._counters: dict[str, int] = {}
        self._lock = threading.Lock()

    def add(self, node_id: str, role: str, address: str, healthy: bool = False) -> Node:
        if role not in ROLES:
            raise GatewayError(f"unknown node role {role!r}")
        with self._lock:
            if node_id in self._nodes:
                raise GatewayError(f"duplicate node id {node_id!r}")
            node = Node(node_id, role, address, health=HEALTHY if healthy else NEW)
            self._nodes[node_id] = node
            self._order.append(node_id)
            return node

    def get(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"no node {node_id!r}") from None

    def nodes(self, role: Optional[str] = None) -> list[Node]:
        with self._lock:
            nodes = [self._nodes[node_id] for node_id in self._order]
        return [n for n in nodes if role is None or n.role == role]

    def healthy_nodes(self, role: str) -> list[Node]:
        return [n for n in self.nodes(role) if n.health == HEALTHY]

    # --------------------------------------------------------- transitions

    def record_success(self, node_id: str) -> str:
        with self._lock:
            node = self.get(node_id)
            node.consecutive_failures = 0
            node.consecutive_successes += 1
            if node.health == NEW:
                node.health = HEALTHY
            elif node.health == UNHEALTHY and (
                node.consecutive_successes >= self.recover_threshold
            ):
                node.health = HEALTHY
                node.unhealthy_since = None
            return node.health

    def record_failure(self, node_id: str) -> str:
        with self._lock:
            node = self.get(node_id)
            node.consecutive_successes = 0
            node.consecutive_failures += 1
            if node.health != UNHEALTHY and node.consecutive_failures >= self.fail_threshold:
                node.health = UNHEALTHY
                node.unhealthy_since = time.time()
            return node.health

    def mark_unhealthy(self, node_id: str) -> None:
        """Administrative kill switch (fault injection in tests)."""
        with self._lock:
            node = self.get(node_id)
            node.health = UNHEALTHY
            node.consecutive_successes = 0
            node.unhealthy_since = time.time()

    # ------------------------------------------------------------ balancing

    def balance(self, role: str) -> Node:
        """Next Healthy node of the role, strict round-robin."""
        with self._lock:
            healthy = [
                self._nodes[node_id]
                for node_id in self._order
                if self._nodes[node_id].role == role
                and self._nodes[node_id].health == HEALTHY
            ]
            if not healthy:
                raise NoHealthyBackend(role)
            index = self._counters.get(role, 0)
            self._counters[role] = index + 1
            return healthy[index % len(healthy)]

    def to_json(self) -> list[dict]:
        return [node.to_json() for node in self.nodes()]


def probe_once(node: Node, timeout_s: float = 2.0) -> bool:
    """GET {address}/health; local: workers are probed in-process."""
    if node.address.startswith("local:"):
        return True
    try:
        with urllib.request.urlopen(node.address + "/health", timeout=timeout_s) as resp:
            return 200 <= resp.status < 300
    except (urllib.error.URLError, ConnectionError, OSError):
        return False


def probe_health(registry: NodeRegistry, node_id: str, timeout_s: float = 2.0) -> str:
    """One probe cycle for one node; returns the resulting health state."""
    node = registry.get(node_id)
    if probe_once(node, timeout_s):
        return registry.record_success(node_id)
    return registry.record_failure(node_id)


class HealthProber:
    """Background prober: sweeps every node each interval."""

    def __init__(self, registry: NodeRegistry, interval_s: float = 1.0, timeout_s: float = 2.0):
        self.registry = registry
        self.interval_s = interval_s
        self.timeout_s = timeout_s
        self._stop = threading.Event()
        self._thread: Optional[threading.Thread] = None

    def sweep(self) -> None:
        for node in self.registry.nodes():
            probe_health(self.registry, node.node_id, self.timeout_s)

    def start(self) -> None:
        if self._thread is not None:
            return

        def run():
            while not self._stop.is_set():
                self.sweep()
                self._stop.wait(self.interval_s)

        self._thread = threading.Thread(target=run, daemon=True, name="health-prober")
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
