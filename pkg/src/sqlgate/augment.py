"""Training-corpus construction: template propagation and corpus mixing.

One SQL template fans out in two directions, field instances (concrete
SQL commands) and NL paraphrases, then the two sides are paired so every
emitted (NL, SQL) pair shares identical slot substitutions. A seeded mixer
blends the domain pairs with an open text-to-SQL corpus at a configurable
ratio (1:1 by default).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Iterable, Optional

import random

from sqlgate.errors import SqlgateError
from sqlgate.sql import parse

_SLOT = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")


class AugmentError(SqlgateError):
    pass


class SlotMismatch(AugmentError):
    pass


class UnparseableInstantiation(AugmentError):
    def __init__(self, values: dict, detail: str):
        super().__init__(f"instantiation {values!r} yields invalid SQL: {detail}")
        self.values = values


class EmptyCorpus(AugmentError):
    pass


def _slots_in(text: str) -> set[str]:
    return set(_SLOT.findall(text))


def _sql_escape(value: object) -> str:
    if isinstance(value, str):
        return value.replace("'", "''")
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class SqlTemplate:
    text: str
    slot_types: dict[str, str]  # slot -> "text" | "int" | "float"

    def __post_init__(self):
        undeclared = _slots_in(self.text) - set(self.slot_types)
        if undeclared:
            raise SlotMismatch(f"undeclared slots in SQL template: {sorted(undeclared)}")

    def instantiate(self, values: dict[str, object]) -> str:
        def repl(match: re.Match) -> str:
            return _sql_escape(values[match.group(1)])

        return _SLOT.sub(repl, self.text)


@dataclass(frozen=True)
class NlTemplateSet:
    paraphrases: tuple[str, ...]
    slots: frozenset[str]

    def __post_init__(self):
        if not self.paraphrases:
            raise SlotMismatch("paraphrase list must be non-empty")
        for text in self.paraphrases:
            used = _slots_in(text)
            if used != set(self.slots):
                raise SlotMismatch(
                    f"paraphrase {text!r} uses slots {sorted(used)}, "
                    f"declared {sorted(self.slots)}"
                )

    @staticmethod
    def for_template(template: SqlTemplate, paraphrases: Iterable[str]) -> "NlTemplateSet":
        return NlTemplateSet(tuple(paraphrases), frozenset(template.slot_types))


@dataclass(frozen=True)
class FieldInstanceSet:
    values: dict[str, tuple]  # slot -> concrete values, all non-empty

    def validate_against(self, template: SqlTemplate) -> None:
        missing = set(template.slot_types) - set(self.values)
        if missing:
            raise SlotMismatch(f"no values for slots: {sorted(missing)}")
        for slot, options in self.values.items():
            if not options:
                raise SlotMismatch(f"empty value list for slot {slot!r}")


@dataclass(frozen=True)
class Pair:
    nl: str
    sql: str
    source: str  # "domain" | "open"
    slots: Optional[dict] = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {"nl": self.nl, "sql": self.sql, "source": self.source}


@dataclass
class DatasetMix:
    pairs: list[Pair]
    domain_count: int
    open_count: int
    ratio: tuple[int, int]


def _instantiate_nl(text: str, values: dict[str, object]) -> str:
    return _SLOT.sub(lambda match: str(values[match.group(1)]), text)


def expand(
    template: SqlTemplate,
    nls: NlTemplateSet,
    fields: FieldInstanceSet,
    mode: str = "cartesian",
) -> list[Pair]:
    """Propagate one template into matched (NL, SQL) pairs.

    cartesian: every paraphrase x every field combination.
    aligned: field lists of equal length zipped positionally; paraphrases
    rotate over the tuples.
    """
    if set(nls.slots) != set(template.slot_types):
        raise SlotMismatch(
            f"paraphrases declare {sorted(nls.slots)}, template declares "
            f"{sorted(template.slot_types)}"
        )
    fields.validate_against(template)
    slot_order = list(template.slot_types)
    pairs: list[Pair] = []

    def emit(nl_text: str, values: dict[str, object]) -> None:
        sql = template.instantiate(values)
        try:
            parse(sql)
        except SqlgateError as exc:
            raise UnparseableInstantiation(values, str(exc)) from None
        pairs.append(Pair(_instantiate_nl(nl_text, values), sql, "domain", dict(values)))

    if mode == "cartesian":
        for nl_text in nls.paraphrases:
            for combo in product(*(fields.values[slot] for slot in slot_order)):
                emit(nl_text, dict(zip(slot_order, combo)))
    elif mode == "aligned":
        lengths = {slot: len(fields.values[slot]) for slot in slot_order}
        if len(set(lengths.values())) > 1:
            raise SlotMismatch(f"aligned mode needs equal-length value lists: {lengths}")
        count = next(iter(lengths.values()))
        for i in range(count):
            values = {slot: fields.values[slot][i] for slot in slot_order}
            emit(nls.paraphrases[i % len(nls.paraphrases)], values)
    else:
        raise AugmentError(f"unknown expansion mode {mode!r}")
    return pairs


def parse_ratio(text: str | tuple[int, int]) -> tuple[int, int]:
    if isinstance(text, tuple):
        a, b = text
    else:
        try:
            left, right = text.split(":")
            a, b = int(left), int(right)
        except ValueError:
            raise AugmentError(f"ratio must look like '1:1', got {text!r}") from None
    if a < 0 or b < 0 or (a == 0 and b == 0):
        raise AugmentError(f"ratio components must be non-negative and not both zero")
    return a, b


def mix(
    domain: list[Pair],
    open_corpus: list[Pair],
    ratio: str | tuple[int, int] = (1, 1),
    seed: int = 0,
) -> DatasetMix:
    """Blend the two corpora at ``ratio`` with a seed-deterministic shuffle."""
    if not domain:
        raise EmptyCorpus("domain corpus is empty")
    if not open_corpus:
        raise EmptyCorpus("open corpus is empty")
    a, b = parse_ratio(ratio)
    scale_limits = []
    if a:
        scale_limits.append(len(domain) // a)
    if b:
        scale_limits.append(len(open_corpus) // b)
    k = min(scale_limits)
    n_domain, n_open = a * k, b * k

    rng = random.Random(seed)
    domain_pool = list(domain)
    open_pool = list(open_corpus)
    rng.shuffle(domain_pool)
    rng.shuffle(open_pool)
    chosen = domain_pool[:n_domain] + open_pool[:n_open]
    rng.shuffle(chosen)
    return DatasetMix(chosen, n_domain, n_open, (a, b))


# ----------------------------------------------------------------------- io


def load_templates(path: str | Path) -> list[tuple[SqlTemplate, NlTemplateSet, FieldInstanceSet]]:
    """JSON documents of {"sql_template", "nl_templates": [...], "fields":
    {slot: [...]}}; a file holds one document or a list of them."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    docs = doc if isinstance(doc, list) else [doc]
    return [_parse_template_doc(d) for d in docs]


def _parse_template_doc(doc: dict) -> tuple[SqlTemplate, NlTemplateSet, FieldInstanceSet]:
    fields = {slot: tuple(values) for slot, values in doc["fields"].items()}
    slot_types = {slot: _infer_type(values) for slot, values in fields.items()}
    template = SqlTemplate(doc["sql_template"], slot_types)
    nls = NlTemplateSet(tuple(doc["nl_templates"]), frozenset(slot_types))
    return template, nls, FieldInstanceSet(fields)


def _infer_type(values: tuple) -> str:
    if all(isinstance(v, bool) for v in values):
        return "text"
    if all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        return "int"
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        return "float"
    return "text"


def load_open_corpus(path: str | Path) -> list[Pair]:
    """Spider/WikiSQL-shaped JSON: objects with question, query, db_id."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        records = json.loads(text)
    else:
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
    pairs = []
    for record in records:
        pairs.append(Pair(record["question"], record["query"], "open"))
    return pairs


def write_pairs_jsonl(pairs: Iterable[Pair], path: str | Path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as out:
        for pair in pairs:
            out.write(json.dumps(pair.to_json(), ensure_ascii=False, sort_keys=True))
            out.write("\n")
            count += 1
    return count
