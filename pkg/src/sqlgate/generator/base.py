"""Generation request/result types and the backend interface."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Protocol

from sqlgate.errors import SqlgateError
from sqlgate.sql.ast import Schema


class GenerationError(SqlgateError):
    pass


class NoMatch(GenerationError):
    """No template rule fired; callers may fall back to a remote backend."""

    def __init__(self, reason: str):
        super().__init__(f"no rule matched: {reason}")
        self.reason = reason


class ExemplarInvalid(GenerationError):
    def __init__(self, index: int, nl: str, detail: str):
        super().__init__(f"exemplar {index} ({nl!r}): {detail}")
        self.index = index


class BackendUnreachable(GenerationError):
    pass


class BackendTimeout(GenerationError):
    pass


class EmptyCompletion(GenerationError):
    pass


@dataclass(frozen=True)
class GenerationRequest:
    nl_query: str
    schema: Schema
    backend_id: str = ""
    max_candidates: int = 1

    def __post_init__(self):
        if not self.nl_query.strip():
            raise GenerationError("nl_query must be non-empty")


@dataclass
class GenerationResult:
    candidates: list[str]  # raw SQL, pre-check
    backend_id: str
    prompt: str = ""  # audit trail: the prompt that produced the candidates
    elapsed_s: float = 0.0

    def __post_init__(self):
        if not self.candidates:
            raise GenerationError("a generation result carries >= 1 candidate")

    @property
    def sql(self) -> str:
        return self.candidates[0]


class Backend(Protocol):
    backend_id: str

    def generate(self, request: GenerationRequest) -> GenerationResult: ...


class MappingBackend:
    """Fixed nl -> sql lookup; used by harnesses and as a test stub."""

    def __init__(self, mapping: dict[str, str], backend_id: str = "mapping"):
        self.mapping = mapping
        self.backend_id = backend_id

    def generate(self, request: GenerationRequest) -> GenerationResult:
        started = time.perf_counter()
        try:
            sql = self.mapping[request.nl_query]
        except KeyError:
            raise NoMatch(f"no mapping for {request.nl_query!r}") from None
        return GenerationResult(
            [sql], self.backend_id, elapsed_s=time.perf_counter() - started
        )
