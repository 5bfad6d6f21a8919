"""Remote completion backend speaking the local-model wire protocol.

POST <endpoint> with {"prompt", "max_tokens", "temperature"}; the server
answers {"text": "..."}. Path or server quirks are handled by pointing the
endpoint at an adapter, not by code here. Candidates come back raw:
checking is the checker's job.
"""

from __future__ import annotations

import json
import re
import socket
import time
import urllib.error
import urllib.request
from typing import Optional

from sqlgate.generator.base import (
    BackendTimeout,
    BackendUnreachable,
    EmptyCompletion,
    GenerationRequest,
    GenerationResult,
)
from sqlgate.errors import SqlgateError
from sqlgate.generator.prompt import build_prompt
from sqlgate.sql import parse, tokenize
from sqlgate.sql.ast import Stacked
from sqlgate.sql.errors import LexError
from sqlgate.sql.tokens import TokenKind

_FENCED = re.compile(r"```(?:sql)?\s*\n?(.*?)```", re.DOTALL | re.IGNORECASE)
_STATEMENT_HEADS = ("select", "insert", "update", "delete", "drop")


def post_completion(
    endpoint: str,
    prompt: str,
    max_tokens: int = 256,
    temperature: float = 0.0,
    timeout_s: float = 30.0,
) -> str:
    """One round-trip of the completion wire protocol; returns raw text."""
    body = json.dumps(
        {"prompt": prompt, "max_tokens": max_tokens, "temperature": temperature}
    ).encode("utf-8")
    request = urllib.request.Request(
        endpoint, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout_s) as response:
            payload = json.loads(response.read().decode("utf-8"))
    except socket.timeout as exc:
        raise BackendTimeout(f"{endpoint}: no response within {timeout_s}s") from exc
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, socket.timeout):
            raise BackendTimeout(f"{endpoint}: no response within {timeout_s}s") from exc
        raise BackendUnreachable(f"{endpoint}: {exc.reason}") from exc
    except (ConnectionError, OSError) as exc:
        raise BackendUnreachable(f"{endpoint}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise EmptyCompletion(f"{endpoint}: response is not JSON") from exc
    text = payload.get("text")
    if not isinstance(text, str):
        raise EmptyCompletion(f"{endpoint}: response carries no 'text' field")
    return text


def extract_sql(text: str) -> Optional[str]:
    """First fenced block wins, else the first statement-shaped line
    (semicolon-trimmed only when what remains is a single statement), else
    the first SQL-fragment-shaped line.

    Stacked statements and fragments are deliberately passed through
    whole: candidates come back raw and the checker decides, so a hostile
    completion cannot dodge screening by stacking or by being malformed.
    """
    fenced = _FENCED.search(text)
    if fenced:
        candidate = fenced.group(1).strip()
        return candidate or None
    fragment: Optional[str] = None
    for line in text.splitlines():
        whole = line.strip()
        if not whole:
            continue
        chunk = whole.split(";")[0].strip() if ";" in whole else whole
        if _parses(whole):
            stacked = ";" in whole and _parses_stacked(whole)
            return whole if stacked or chunk == whole else chunk
        if chunk != whole and _parses(chunk):
            return chunk
        for candidate in (whole, chunk):
            tokens = _lex(candidate)
            if not tokens:
                continue
            head = tokens[0]
            if head.kind is TokenKind.KEYWORD and head.value in _STATEMENT_HEADS:
                return candidate
            if fragment is None and any(
                tok.kind in (TokenKind.KEYWORD, TokenKind.OP, TokenKind.STRING)
                for tok in tokens
            ):
                fragment = candidate
    return fragment


def _lex(chunk: str):
    try:
        return tokenize(chunk)
    except LexError:
        return None


def _parses(chunk: str) -> bool:
    try:
        parse(chunk)
        return True
    except SqlgateError:
        return False


def _parses_stacked(chunk: str) -> bool:
    try:
        return isinstance(parse(chunk), Stacked)
    except SqlgateError:
        return False


class RemoteBackend:
    def __init__(
        self,
        endpoint: str,
        exemplars: Optional[list[tuple[str, str]]] = None,
        timeout_s: float = 30.0,
        max_tokens: int = 256,
        temperature: float = 0.0,
    ):
        self.endpoint = endpoint
        self.exemplars = exemplars or []
        self.timeout_s = timeout_s
        self.max_tokens = max_tokens
        self.temperature = temperature
        self.backend_id = f"remote:{endpoint}"

    def generate(self, request: GenerationRequest) -> GenerationResult:
        started = time.perf_counter()
        prompt = build_prompt(request.schema, self.exemplars, request.nl_query)
        text = post_completion(
            self.endpoint,
            prompt.text,
            max_tokens=self.max_tokens,
            temperature=self.temperature,
            timeout_s=self.timeout_s,
        )
        candidate = extract_sql(text)
        if candidate is None:
            raise EmptyCompletion(f"{self.endpoint}: no SQL found in completion")
        return GenerationResult(
            [candidate],
            self.backend_id,
            prompt=prompt.text,
            elapsed_s=time.perf_counter() - started,
        )
