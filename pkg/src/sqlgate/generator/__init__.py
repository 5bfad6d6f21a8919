"""NL-to-SQL generation: template rules plus remote completion backends."""

from sqlgate.generator.base import (
    Backend,
    BackendTimeout,
    BackendUnreachable,
    EmptyCompletion,
    ExemplarInvalid,
    GenerationError,
    GenerationRequest,
    GenerationResult,
    MappingBackend,
    NoMatch,
)
from sqlgate.generator.prompt import PromptTemplate, build_prompt
from sqlgate.generator.remote import RemoteBackend, extract_sql, post_completion
from sqlgate.generator.template_backend import TemplateBackend

__all__ = [
    "Backend", "BackendTimeout", "BackendUnreachable", "EmptyCompletion",
    "ExemplarInvalid", "GenerationError", "GenerationRequest",
    "GenerationResult", "MappingBackend", "NoMatch", "PromptTemplate",
    "build_prompt", "RemoteBackend", "extract_sql", "post_completion",
    "TemplateBackend",
]
