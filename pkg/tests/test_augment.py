import json
import random

import pytest

from sqlgate.augment import (
    EmptyCorpus,
    FieldInstanceSet,
    NlTemplateSet,
    Pair,
    SlotMismatch,
    SqlTemplate,
    UnparseableInstantiation,
    expand,
    load_open_corpus,
    load_templates,
    mix,
    parse_ratio,
    write_pairs_jsonl,
)
from sqlgate.sql import parse


TEMPLATE = SqlTemplate(
    "select cpc, count(*) as count from google_full where assignee like '%{assignee}%' "
    "and grant_date >= '{year}' group by cpc order by count desc limit {n}",
    {"assignee": "text", "year": "text", "n": "int"},
)
NLS = NlTemplateSet.for_template(
    TEMPLATE,
    [
        "top {n} cpc codes for {assignee} after {year}",
        "which {n} classifications does {assignee} use most since {year}",
        "show {assignee}'s {n} busiest cpc groups from {year} on",
    ],
)
FIELDS = FieldInstanceSet(
    {"assignee": ("Intel", "AMD"), "year": ("2009",), "n": (10,)}
)


def test_cartesian_count_is_product():
    pairs = expand(TEMPLATE, NLS, FIELDS, mode="cartesian")
    assert len(pairs) == 3 * 2 * 1 * 1  # |nls| x |assignee| x |year| x |n|


def test_pairs_share_substitutions_and_parse():
    for pair in expand(TEMPLATE, NLS, FIELDS):
        parse(pair.sql)
        assert pair.slots["assignee"] in pair.nl
        assert pair.slots["assignee"] in pair.sql
        assert str(pair.slots["n"]) in pair.nl
        # soundness: substituting the recorded slots reproduces the SQL
        assert TEMPLATE.instantiate(pair.slots) == pair.sql


def test_empty_value_list_fails_validation():
    fields = FieldInstanceSet({"assignee": (), "year": ("2009",), "n": (10,)})
    with pytest.raises(SlotMismatch):
        expand(TEMPLATE, NLS, fields)


def test_missing_slot_fails_validation():
    fields = FieldInstanceSet({"assignee": ("Intel",)})
    with pytest.raises(SlotMismatch):
        expand(TEMPLATE, NLS, fields)


def test_paraphrase_slot_set_must_match():
    with pytest.raises(SlotMismatch):
        NlTemplateSet.for_template(TEMPLATE, ["top {n} codes"])  # missing slots
    with pytest.raises(SlotMismatch):
        NlTemplateSet.for_template(TEMPLATE, ["{n} {assignee} {year} {extra}"])


def test_undeclared_sql_slot_rejected():
    with pytest.raises(SlotMismatch):
        SqlTemplate("select * from t where a = '{ghost}'", {})


def test_aligned_mode_zips_and_rotates():
    template = SqlTemplate(
        "select * from google_full where assignee like '%{assignee}%' and grant_date >= '{year}'",
        {"assignee": "text", "year": "text"},
    )
    nls = NlTemplateSet.for_template(
        template, ["{assignee} patents after {year}", "patents by {assignee} since {year}"]
    )
    fields = FieldInstanceSet(
        {"assignee": ("Intel", "AMD", "IBM"), "year": ("2009", "2010", "2011")}
    )
    pairs = expand(template, nls, fields, mode="aligned")
    assert len(pairs) == 3
    assert pairs[0].slots == {"assignee": "Intel", "year": "2009"}
    assert pairs[1].slots == {"assignee": "AMD", "year": "2010"}
    assert pairs[0].nl.startswith("Intel patents")
    assert pairs[1].nl.startswith("patents by AMD")

    ragged = FieldInstanceSet({"assignee": ("Intel",), "year": ("2009", "2010")})
    with pytest.raises(SlotMismatch):
        expand(template, nls, ragged, mode="aligned")


def test_quote_bearing_value_is_escaped_not_corrupting():
    template = SqlTemplate(
        "select * from google_full where assignee like '%{assignee}%'",
        {"assignee": "text"},
    )
    nls = NlTemplateSet.for_template(template, ["patents by {assignee}"])
    fields = FieldInstanceSet({"assignee": ("O'Brien & Sons",)})
    (pair,) = expand(template, nls, fields)
    stmt = parse(pair.sql)  # would raise if the quote broke the literal
    assert stmt.where.pattern.value == "%O'Brien & Sons%"
    assert "O'Brien & Sons" in pair.nl  # raw on the NL side


def test_unparseable_instantiation_names_tuple():
    template = SqlTemplate("select * from t limit {n}", {"n": "int"})
    nls = NlTemplateSet.for_template(template, ["first {n}"])
    fields = FieldInstanceSet({"n": (-3,)})
    with pytest.raises(UnparseableInstantiation) as exc:
        expand(template, nls, fields)
    assert exc.value.values == {"n": -3}


def test_cartesian_count_law_random():
    rng = random.Random(5150)
    for _ in range(25):
        n_para = rng.randint(1, 4)
        slot_sizes = [rng.randint(1, 3) for _ in range(rng.randint(1, 3))]
        slots = {f"s{i}": tuple(f"v{i}_{j}" for j in range(size)) for i, size in enumerate(slot_sizes)}
        clause = " and ".join(f"c{i} = '{{s{i}}}'" for i in range(len(slot_sizes)))
        template = SqlTemplate(
            f"select * from t where {clause}", {slot: "text" for slot in slots}
        )
        nl_body = " ".join(f"{{s{i}}}" for i in range(len(slot_sizes)))
        nls = NlTemplateSet.for_template(
            template, [f"p{k} {nl_body}" for k in range(n_para)]
        )
        pairs = expand(template, nls, FieldInstanceSet(slots))
        expected = n_para
        for size in slot_sizes:
            expected *= size
        assert len(pairs) == expected


# ---------------------------------------------------------------------- mix


def make_pairs(prefix, count, source):
    return [Pair(f"{prefix} q{i}", f"select * from t{i}", source) for i in range(count)]


def test_mix_one_to_one():
    result = mix(make_pairs("d", 100, "domain"), make_pairs("o", 250, "open"), "1:1", seed=3)
    assert result.domain_count == 100
    assert result.open_count == 100
    assert len(result.pairs) == 200
    assert abs(result.domain_count - result.open_count) <= 1


def test_mix_domain_only():
    result = mix(make_pairs("d", 40, "domain"), make_pairs("o", 9, "open"), "1:0", seed=3)
    assert result.domain_count == 40
    assert result.open_count == 0
    assert all(p.source == "domain" for p in result.pairs)


def test_mix_two_to_one():
    result = mix(make_pairs("d", 100, "domain"), make_pairs("o", 250, "open"), "2:1", seed=3)
    assert (result.domain_count, result.open_count) == (100, 50)


def test_mix_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        mix([], make_pairs("o", 5, "open"))
    with pytest.raises(EmptyCorpus):
        mix(make_pairs("d", 5, "domain"), [])


def test_mix_deterministic_under_seed(tmp_path):
    domain = make_pairs("d", 30, "domain")
    open_corpus = make_pairs("o", 50, "open")
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    write_pairs_jsonl(mix(domain, open_corpus, "1:1", seed=7).pairs, first)
    write_pairs_jsonl(mix(domain, open_corpus, "1:1", seed=7).pairs, second)
    assert first.read_bytes() == second.read_bytes()
    third = tmp_path / "c.jsonl"
    write_pairs_jsonl(mix(domain, open_corpus, "1:1", seed=8).pairs, third)
    assert first.read_bytes() != third.read_bytes()


def test_duplicates_preserved():
    domain = make_pairs("same", 1, "domain") * 4
    result = mix(domain, make_pairs("o", 4, "open"), "1:1", seed=0)
    assert result.domain_count == 4
    assert len([p for p in result.pairs if p.source == "domain"]) == 4


def test_parse_ratio_errors():
    assert parse_ratio("3:2") == (3, 2)
    with pytest.raises(Exception):
        parse_ratio("nope")
    with pytest.raises(Exception):
        parse_ratio("0:0")


# ----------------------------------------------------------------------- io


def test_template_file_round_trip(tmp_path):
    doc = {
        "sql_template": "select count(*) from google_full where assignee like '%{assignee}%' and grant_date >= '{year}'",
        "nl_templates": ["how many {assignee} patents since {year}"],
        "fields": {"assignee": ["Intel"], "year": ["2015"]},
    }
    path = tmp_path / "template.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    ((template, nls, fields),) = load_templates(path)
    pairs = expand(template, nls, fields)
    path.write_text(json.dumps([doc, doc]), encoding="utf-8")
    assert len(load_templates(path)) == 2
    assert pairs[0].sql == (
        "select count(*) from google_full where assignee like '%Intel%' and grant_date >= '2015'"
    )


def test_open_corpus_spider_shape(tmp_path):
    records = [
        {"question": "How many heads?", "query": "SELECT count(*) FROM head", "db_id": "dept"},
        {"question": "List names", "query": "SELECT name FROM people", "db_id": "people"},
    ]
    as_array = tmp_path / "spider.json"
    as_array.write_text(json.dumps(records), encoding="utf-8")
    pairs = load_open_corpus(as_array)
    assert [p.nl for p in pairs] == ["How many heads?", "List names"]
    assert all(p.source == "open" for p in pairs)

    as_lines = tmp_path / "spider.jsonl"
    as_lines.write_text("\n".join(json.dumps(r) for r in records), encoding="utf-8")
    assert load_open_corpus(as_lines) == pairs


def test_jsonl_output_shape(tmp_path):
    path = tmp_path / "out.jsonl"
    write_pairs_jsonl(make_pairs("d", 2, "domain"), path)
    lines = [json.loads(line) for line in path.read_text().splitlines()]
    assert lines[0] == {"nl": "d q0", "source": "domain", "sql": "select * from t0"}
