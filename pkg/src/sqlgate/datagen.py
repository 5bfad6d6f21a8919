"""Seeded demo data: synthetic patent rows and the labeled checker corpus.

The row distribution is simple enough to reason about by hand: each
assignee is drawn from a fixed weight table, and each assignee
concentrates on four "focus" CPC codes (weights 8/5/3/2 against 1 for the
rest), so per-assignee top-CPC queries have stable, distinct counts.
Grant years spread uniformly over 1995-2024. Everything is a pure
function of the seed; the bundled files regenerate byte-identically via
``sqlgate demo-data``.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from random import Random

from sqlgate.generator import GenerationRequest
from sqlgate.generator.template_backend import TemplateBackend
from sqlgate.sql.ast import Column, ColumnType, Schema

DEFAULT_SEED = 20240601
DEFAULT_ROWS = 10_000

ASSIGNEES = [
    ("Intel Corporation", 18),
    ("Advanced Micro Devices", 13),
    ("International Business Machines", 13),
    ("Samsung Electronics", 12),
    ("Taiwan Semiconductor", 10),
    ("Qualcomm Incorporated", 8),
    ("Micron Technology", 8),
    ("NVIDIA Corporation", 7),
    ("Texas Instruments", 6),
    ("Sony Group", 5),
]

CPC_CODES = [
    "G06F", "H01L", "H04L", "G06N", "H04W", "G11C", "G02B",
    "H01M", "A61B", "G06T", "Y02D", "G06Q", "H03K", "B60L",
]

_FOCUS_WEIGHTS = (8, 5, 3, 2)

_TITLE_HEADS = [
    "Adaptive", "Distributed", "Layered", "Parallel", "Secure",
    "Low-power", "Scalable", "Hybrid", "Embedded", "Optical",
]
_TITLE_BODIES = [
    "memory controller", "signal processor", "cache hierarchy",
    "neural accelerator", "interconnect fabric", "power regulator",
    "image sensor", "storage array", "scheduler", "codec pipeline",
]
_TITLE_TAILS = [
    "for mobile devices", "for data centers", "with error correction",
    "with dynamic scaling", "for wireless networks", "with low latency",
    "for heterogeneous systems", "with thermal management",
]


def patent_schema() -> Schema:
    return Schema(
        {
            "google_full": [
                Column("patent_id", ColumnType.TEXT),
                Column("assignee", ColumnType.TEXT),
                Column("cpc", ColumnType.TEXT),
                Column("grant_date", ColumnType.DATE),
                Column("title", ColumnType.TEXT),
            ]
        }
    )


def cpc_weights(assignee_index: int) -> list[int]:
    """Focus codes rotate with the assignee so every company has its own
    characteristic top-4."""
    weights = [1] * len(CPC_CODES)
    for rank, weight in enumerate(_FOCUS_WEIGHTS):
        weights[(assignee_index * 3 + rank) % len(CPC_CODES)] = weight
    return weights


def patent_rows(count: int = DEFAULT_ROWS, seed: int = DEFAULT_SEED) -> list[dict]:
    rng = Random(seed)
    names = [name for name, _ in ASSIGNEES]
    name_weights = [weight for _, weight in ASSIGNEES]
    per_assignee_cpc = {name: cpc_weights(i) for i, name in enumerate(names)}
    rows = []
    for i in range(count):
        assignee = rng.choices(names, weights=name_weights, k=1)[0]
        cpc = rng.choices(CPC_CODES, weights=per_assignee_cpc[assignee], k=1)[0]
        year = rng.randint(1995, 2024)
        month = rng.randint(1, 12)
        day = rng.randint(1, 28)
        title = (
            f"{rng.choice(_TITLE_HEADS)} {rng.choice(_TITLE_BODIES)} "
            f"{rng.choice(_TITLE_TAILS)}"
        )
        rows.append(
            {
                "patent_id": f"US{i + 1:07d}",
                "assignee": assignee,
                "cpc": cpc,
                "grant_date": f"{year}-{month:02d}-{day:02d}",
                "title": title,
            }
        )
    return rows


def top_cpc_oracle(
    rows: list[dict],
    assignee_contains: str,
    min_grant_date: str,
    limit: int = 10,
) -> list[tuple[str, int]]:
    """Brute-force reference answer for the grouped top-CPC query, computed
    with plain dict arithmetic (independent of the query engine). Ties
    break by ascending CPC code, mirroring the engine's documented rule."""
    counts: dict[str, int] = {}
    for row in rows:
        if assignee_contains in row["assignee"] and row["grant_date"] >= min_grant_date:
            counts[row["cpc"]] = counts.get(row["cpc"], 0) + 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:limit]


# ------------------------------------------------------------ checker corpus

#: 20 statements built to trigger R1-R7 (hand-audited; rule ids recorded
#: for the per-statement attribution test)
MALICIOUS_STATEMENTS = [
    ("SELECT * FROM google_full WHERE patent_id = 'x' OR '1'='1'", {"R1"}),
    ("SELECT * FROM users WHERE name = 'admin' OR 1=1", {"R1"}),
    ("SELECT title FROM google_full WHERE assignee = 'a' OR 2.5=2.5", {"R1"}),
    ("SELECT * FROM accounts WHERE owner = 'x' OR id=id", {"R1"}),
    ("SELECT patent_id FROM google_full; DROP TABLE google_full", {"R2", "R5"}),
    ("SELECT title FROM google_full WHERE cpc = 'G06F'; DELETE FROM google_full", {"R2", "R5"}),
    ("SELECT a FROM t; INSERT INTO logs (msg) VALUES ('pwned')", {"R2"}),
    ("SELECT a FROM t; UPDATE users SET admin = 1 WHERE name = 'me'", {"R2"}),
    ("SELECT * FROM google_full WHERE assignee = 'Intel' -- ' AND secret = 1", {"R3"}),
    ("SELECT * FROM users WHERE pw = '' /* cut */ OR 'a'='a'", {"R1", "R3"}),
    ("SELECT title FROM google_full UNION SELECT name FROM sqlite_master", {"R4"}),
    ("SELECT patent_id FROM google_full UNION SELECT passwd FROM pg_shadow", {"R4"}),
    ("DROP TABLE google_full", {"R5"}),
    ("DELETE FROM google_full", {"R5"}),
    ("UPDATE google_full SET assignee = 'x'", {"R5"}),
    ("SELECT * FROM google_full WHERE patent_id = 0x70776e64", {"R6"}),
    ("SELECT * FROM google_full WHERE title = CHAR(112)", {"R6"}),
    ("SELECT * FROM logs WHERE ts = benchmark(1000000, 'x')", {"R6"}),
    ("x' OR '1'='1", {"R7"}),
    ("admin'--", {"R7"}),
]

#: NL sentences whose template translations form the benign half
BENIGN_SENTENCES = [
    "tell me the top 10 most frequently appeared CPC by the assignee of Intel after 2009",
    "count patents granted after 2015",
    "count patents by the assignee of Intel",
    "top 5 cpc since 2011",
    "show patents where the assignee is 'NVIDIA Corporation'",
    "list patents before 2001",
    "top 3 cpc for the assignee of Samsung Electronics after 2018",
    "how many patents until 2005",
    "show patents of the assignee of Qualcomm Incorporated",
    "count patents after 1999",
    "top 7 cpc by the assignee of Micron Technology",
    "find patents where the title is 'Memory Controller'",
    "list patents since 2023",
    "top 2 assignee after 2010",
    "how many patents by the assignee of Texas Instruments before 2015",
    "show patents after 2020",
    "count patents",
    "top 4 cpc until 2000",
    "show patents where the company is 'Sony Group'",
    "list patents of the assignee of International Business Machines",
]


def default_synonyms() -> dict:
    return {
        "tables": {"google_full": ["patents", "patent"]},
        "columns": {
            "google_full": {
                "assignee": ["company", "owner", "holder"],
                "cpc": ["cpc code", "classification"],
                "title": ["name"],
                "patent_id": ["patent id", "id"],
            }
        },
    }


def benign_statements() -> list[str]:
    backend = TemplateBackend(patent_schema(), default_synonyms())
    schema = patent_schema()
    return [
        backend.generate(GenerationRequest(nl, schema)).sql for nl in BENIGN_SENTENCES
    ]


def checker_corpus() -> list[tuple[str, bool]]:
    corpus = [(sql, True) for sql, _ in MALICIOUS_STATEMENTS]
    corpus += [(sql, False) for sql in benign_statements()]
    return corpus


# ------------------------------------------------------------- file writers


def write_patent_csv(path: str | Path, count: int = DEFAULT_ROWS, seed: int = DEFAULT_SEED) -> int:
    rows = patent_rows(count, seed)
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["patent_id", "assignee", "cpc", "grant_date", "title"])
        for row in rows:
            writer.writerow(
                [row["patent_id"], row["assignee"], row["cpc"], row["grant_date"], row["title"]]
            )
    return len(rows)


def write_checker_corpus_csv(path: str | Path) -> int:
    corpus = checker_corpus()
    with open(path, "w", newline="", encoding="utf-8") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["statement", "label"])
        for statement, malicious in corpus:
            writer.writerow([statement, 1 if malicious else 0])
    return len(corpus)


def _template_docs() -> list[dict]:
    return [
        {
            "sql_template": (
                "select cpc, count(*) as count from google_full "
                "where assignee like '%{assignee}%' and grant_date >= '{year}' "
                "group by cpc order by count desc limit {n}"
            ),
            "nl_templates": [
                "tell me the top {n} most frequently appeared CPC by the assignee of {assignee} after {year}",
                "top {n} cpc codes for {assignee} since {year}",
                "which {n} classifications does {assignee} use most from {year} on",
            ],
            "fields": {
                "assignee": ["Intel", "AMD", "Samsung", "Qualcomm"],
                "year": ["2009", "2015", "2020"],
                "n": [5, 10],
            },
        },
        {
            "sql_template": (
                "select count(*) from google_full "
                "where assignee like '%{assignee}%' and grant_date >= '{year}'"
            ),
            "nl_templates": [
                "count patents by {assignee} granted after {year}",
                "how many {assignee} patents since {year}",
            ],
            "fields": {
                "assignee": ["Intel", "NVIDIA", "Micron", "Sony"],
                "year": ["1999", "2010", "2021"],
            },
        },
    ]


def _open_corpus_sample() -> list[dict]:
    return [
        {"question": "How many heads of the departments are older than 56 ?",
         "query": "SELECT count(*) FROM head WHERE age > 56", "db_id": "department_management"},
        {"question": "List the name, born state and age of the heads of departments ordered by age.",
         "query": "SELECT name, born_state, age FROM head ORDER BY age", "db_id": "department_management"},
        {"question": "What are the maximum and minimum budget of the departments?",
         "query": "SELECT max(budget_in_billions), min(budget_in_billions) FROM department", "db_id": "department_management"},
        {"question": "What is the average number of employees of the departments whose rank is between 10 and 15?",
         "query": "SELECT avg(num_employees) FROM department WHERE ranking BETWEEN 10 AND 15", "db_id": "department_management"},
        {"question": "What are the names of the states where at least 3 heads were born?",
         "query": "SELECT born_state FROM head GROUP BY born_state HAVING count(*) >= 3", "db_id": "department_management"},
        {"question": "How many acting statuses are there?",
         "query": "SELECT count(DISTINCT temporary_acting) FROM management", "db_id": "department_management"},
        {"question": "Show the name and number of employees for the departments managed by heads whose temporary acting value is 'Yes'?",
         "query": "SELECT T1.name, T1.num_employees FROM department AS T1 JOIN management AS T2 ON T1.department_id = T2.department_id WHERE T2.temporary_acting = 'Yes'", "db_id": "department_management"},
        {"question": "How many departments are led by heads who are not mentioned?",
         "query": "SELECT count(*) FROM department WHERE department_id NOT IN (SELECT department_id FROM management)", "db_id": "department_management"},
        {"question": "What are the distinct creation years of the departments managed by a secretary born in state 'Alabama'?",
         "query": "SELECT DISTINCT T1.creation FROM department AS T1 JOIN management AS T2 ON T1.department_id = T2.department_id JOIN head AS T3 ON T2.head_id = T3.head_id WHERE T3.born_state = 'Alabama'", "db_id": "department_management"},
        {"question": "How many courses are there in total?",
         "query": "SELECT count(*) FROM COURSES", "db_id": "college"},
        {"question": "Find the total student enrollment for different affiliation type schools.",
         "query": "SELECT sum(enrollment), affiliation FROM university GROUP BY affiliation", "db_id": "soccer"},
        {"question": "How many games has each stadium held?",
         "query": "SELECT T1.id, count(*) FROM stadium AS T1 JOIN game AS T2 ON T1.id = T2.stadium_id GROUP BY T1.id", "db_id": "soccer"},
    ]


def _eval_demo_records() -> list[dict]:
    return [
        {
            "question": "tell me the top 10 most frequently appeared CPC by the assignee of Intel after 2009",
            "gold_sql": (
                "select cpc, count(*) as count from google_full "
                "where assignee like '%Intel%' and grant_date >= '2009' "
                "group by cpc order by count desc limit 10"
            ),
            "db_id": "google_full",
        },
        {
            "question": "count patents granted after 2015",
            "gold_sql": "select count(*) from google_full where grant_date >= '2015'",
            "db_id": "google_full",
        },
        {
            "question": "count patents by the assignee of Intel",
            "gold_sql": "select count(*) from google_full where assignee like '%Intel%'",
            "db_id": "google_full",
        },
    ]


def write_demo_data(out_dir: str | Path, count: int = DEFAULT_ROWS, seed: int = DEFAULT_SEED) -> dict:
    """Write every bundled artifact; returns {relative path: row/record count}."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "templates").mkdir(exist_ok=True)
    (out / "policies").mkdir(exist_ok=True)
    (out / "eval").mkdir(exist_ok=True)

    written = {}
    written["patents_10k.csv"] = write_patent_csv(out / "patents_10k.csv", count, seed)
    written["checker_corpus.csv"] = write_checker_corpus_csv(out / "checker_corpus.csv")

    (out / "schema.json").write_text(
        json.dumps(patent_schema().to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (out / "synonyms.json").write_text(
        json.dumps(default_synonyms(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    from sqlgate.checker import DEFAULT_POLICY

    (out / "policies" / "default_policy.json").write_text(
        json.dumps(DEFAULT_POLICY.to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (out / "templates" / "patent_templates.json").write_text(
        json.dumps(_template_docs(), indent=2) + "\n", encoding="utf-8"
    )
    (out / "open_corpus_sample.json").write_text(
        json.dumps(_open_corpus_sample(), indent=2) + "\n", encoding="utf-8"
    )
    with open(out / "eval" / "nl2sql_demo.jsonl", "w", encoding="utf-8") as handle:
        for record in _eval_demo_records():
            handle.write(json.dumps(record, sort_keys=True) + "\n")

    config = {
        "listen": "127.0.0.1:8765",
        "backend_mode": "template",
        "remote_endpoints": [],
        "classifier_endpoints": [],
        "schema": "schema.json",
        "synonyms": "synonyms.json",
        "policy": "policies/default_policy.json",
        "shards": 3,
        "tables": [{"name": "google_full", "key": "patent_id", "csv": "patents_10k.csv"}],
        "static_dir": "../frontend/dist",
        "audit_log": "audit.jsonl",
        "probe_interval_s": 1.0,
    }
    (out / "gateway_config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written["schema.json"] = 1
    written["gateway_config.json"] = 1
    return written
