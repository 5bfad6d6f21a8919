import pytest

from sqlgate.checker import (
    ALL_RULES,
    ALLOW,
    BLOCK,
    DEFAULT_POLICY,
    SYNTAX_ERROR,
    SYNTAX_OK,
    SYNTAX_UNSUPPORTED,
    SecurityPolicy,
    check,
    check_security,
    check_syntax,
    classify_remote,
    has_dangling_quote_region,
    parse_classifier_reply,
    remote_classifier,
)
from sqlgate.checker.engine import ClassifierUnparseable
from sqlgate.generator import GenerationRequest, TemplateBackend

from tests.stubs import StubServer

FLAGSHIP = (
    'SELECT cpc, COUNT(*) AS count FROM google_full WHERE assignee LIKE "%Intel%" '
    'AND grant_date >= "2009" GROUP BY cpc ORDER BY count DESC LIMIT 10'
)


def rules_of(verdict):
    return verdict.rule_ids()


# ------------------------------------------------------------------- syntax


def test_flagship_syntax_ok():
    assert check_syntax(FLAGSHIP) == (SYNTAX_OK, None)


def test_syntax_error_reported():
    status, detail = check_syntax("SELEC a FROM t")
    assert status == SYNTAX_ERROR
    assert "byte 0" in detail


def test_unsupported_distinguished():
    status, detail = check_syntax("SELECT a FROM t JOIN u")
    assert status == SYNTAX_UNSUPPORTED
    assert detail == "JOIN"


# -------------------------------------------------------------------- rules


def test_r1_canonical_tautology():
    verdict = check("SELECT * FROM users WHERE name = 'a' OR '1'='1'")
    assert verdict.security == BLOCK
    assert "R1" in rules_of(verdict)
    hit = [h for h in verdict.rule_hits if h.rule == "R1"][0]
    assert hit.fragment == "'1'='1'"


def test_r1_requires_or_branch():
    # the common benign idiom `WHERE 1=1` alone is not an OR-branch tautology
    verdict = check("SELECT * FROM t WHERE 1=1")
    assert "R1" not in rules_of(verdict)
    verdict = check("SELECT * FROM t WHERE a = 2 AND (b = 3 OR x = x)")
    assert "R1" in rules_of(verdict)


def test_r1_soundness_for_any_literal():
    for literal in ("1", "'a'", "2.5", "'it''s'", "-4"):
        sql = f"SELECT * FROM t WHERE a = 'x' OR {literal} = {literal}"
        assert "R1" in rules_of(check(sql)), sql


def test_r2_and_r5_stacked_drop():
    verdict = check("SELECT a FROM t; DROP TABLE t")
    assert verdict.security == BLOCK
    assert {"R2", "R5"} <= set(rules_of(verdict))


def test_r3_comment_after_string_in_where():
    verdict = check("SELECT * FROM t WHERE name = 'x' --' AND hidden = 1")
    assert "R3" in rules_of(verdict)
    benign = check("SELECT a FROM t -- note")  # comment, but no WHERE string
    assert "R3" not in rules_of(benign)


def test_r4_union_probe_system_table():
    verdict = check("SELECT a FROM t UNION SELECT name FROM sqlite_master")
    assert "R4" in rules_of(verdict)


def test_r4_union_probe_outside_schema():
    sql = "SELECT a FROM t UNION SELECT password FROM admin_users"
    without_schema = check(sql)
    assert "R4" not in rules_of(without_schema)  # no registry to judge against
    with_schema = check(sql, known_tables={"t", "users"})
    assert "R4" in rules_of(with_schema)
    benign = check("SELECT a FROM t UNION SELECT a FROM users", known_tables={"t", "users"})
    assert "R4" not in rules_of(benign)


def test_r5_unguarded_writes():
    assert "R5" in rules_of(check("DELETE FROM t"))
    assert "R5" in rules_of(check("UPDATE t SET a = 1"))
    assert "R5" in rules_of(check("DROP TABLE t"))
    guarded = check("DELETE FROM t WHERE id = 4")
    assert "R5" not in rules_of(guarded)


def test_r6_obfuscation():
    assert "R6" in rules_of(check("SELECT * FROM t WHERE x = 0x41414141"))
    assert "R6" in rules_of(check("SELECT * FROM t WHERE name = CHAR(65)"))
    assert "R6" in rules_of(check("SELECT * FROM t WHERE sleep(5) = 0"))
    assert "R6" in rules_of(check("SELECT * FROM t WHERE benchmark(99, x) = 0"))


def test_r7_unparseable_residue():
    verdict = check("x' OR '1'='1")
    assert verdict.syntax == SYNTAX_ERROR
    assert "R7" in rules_of(verdict)
    assert verdict.security == BLOCK
    verdict = check("' OR '1'='1")
    assert "R7" in rules_of(verdict)


def test_r7_needs_residue_and_quotes():
    # plain typo: unparseable but no quotes at all
    assert "R7" not in rules_of(check("SELEC a FROM t"))
    # unbalanced quote but no OR/UNION/--/; residue
    assert "R7" not in rules_of(check("SELECT a FROM t WHERE x = 'oops"))


def test_dangling_quote_probe():
    assert has_dangling_quote_region("x' OR '1'='1")
    assert has_dangling_quote_region("' OR '1'='1")
    assert has_dangling_quote_region("SELECT 'open")
    # quote-free text can never be a splice fragment
    assert not has_dangling_quote_region("SELECT a FROM t WHERE b = 1")
    # quote-bearing text always dangles in one orientation; R7 stays quiet
    # on such inputs only through its parse-failure + residue conjunction
    assert has_dangling_quote_region("'a' = 'b'")


# ------------------------------------------------------------------- policy


def test_flagship_allowed_with_zero_score():
    verdict = check(FLAGSHIP)
    assert verdict.syntax == SYNTAX_OK
    assert verdict.security == ALLOW
    assert verdict.score == 0.0
    assert verdict.rule_hits == []
    assert not verdict.classifier_used


def test_class_policy_default_deny():
    verdict = check("INSERT INTO t (a) VALUES (1)")
    assert verdict.security == BLOCK
    assert "policy" in rules_of(verdict)

    writes_ok = SecurityPolicy(allow_writes=True)
    verdict = check("INSERT INTO t (a) VALUES (1)", policy=writes_ok)
    assert verdict.security == ALLOW

    # R5 still fires on unguarded writes even when the class is allowed
    verdict = check("DELETE FROM t", policy=writes_ok)
    assert verdict.security == BLOCK
    assert "R5" in rules_of(verdict)


def test_union_class_blocked_by_default():
    verdict = check("SELECT a FROM t UNION SELECT a FROM u")
    assert "policy" in rules_of(verdict)
    union_ok = SecurityPolicy(allow_classes=frozenset({"select", "union"}))
    assert check("SELECT a FROM t UNION SELECT a FROM u", policy=union_ok).security == ALLOW


def test_monotonicity_enabling_rules_never_unblocks():
    samples = [
        "SELECT * FROM users WHERE name = 'a' OR '1'='1'",
        "SELECT a FROM t; DROP TABLE t",
        "SELECT * FROM t WHERE x = 0x41",
        "x' OR '1'='1",
        FLAGSHIP,
        "SELECT a FROM t WHERE b = 2",
    ]
    for sample in samples:
        for base_rules in (frozenset(), frozenset({"R1"}), frozenset({"R1", "R3", "R5"})):
            base = check(sample, policy=SecurityPolicy(rules=base_rules))
            for extra in set(ALL_RULES) - set(base_rules):
                widened = check(
                    sample, policy=SecurityPolicy(rules=base_rules | {extra})
                )
                if base.security == BLOCK:
                    assert widened.security == BLOCK, (sample, base_rules, extra)


def test_benign_closure_template_outputs_pass(patent_schema):
    backend = TemplateBackend(
        patent_schema, {"tables": {"google_full": ["patents", "patent"]}}
    )
    companies = ["Intel", "Samsung Electronics", "O'Brien Labs", "AMD"]
    sentences = []
    for company in companies:
        sentences += [
            f"tell me the top 10 most frequently appeared CPC by the assignee of {company} after 2009",
            f"count patents by the assignee of {company}",
            f"show patents where the assignee is '{company}'",
            f"top 3 cpc for the assignee of {company} since 2015",
            f"how many patents of the assignee of {company} before 2020",
        ]
    sentences += ["count patents", "list patents after 2011", "top 5 cpc until 1999"]
    tables = set(patent_schema.table_names())
    for nl in sentences:
        sql = backend.generate(GenerationRequest(nl, patent_schema)).sql
        verdict = check(sql, policy=DEFAULT_POLICY, known_tables=tables)
        assert verdict.ok, (nl, sql, verdict.rule_ids())
        assert verdict.score == 0.0


def test_check_security_accepts_parsed_statements():
    from sqlgate.sql import parse

    stmt = parse("SELECT * FROM t WHERE a = 'x' OR '1'='1'")
    verdict = check_security(stmt)
    assert verdict.security == BLOCK
    assert "R1" in rules_of(verdict)
    assert verdict.syntax == SYNTAX_OK  # statements are valid by construction

    benign = check_security(parse(FLAGSHIP))
    assert benign.security == ALLOW


def test_verdict_invariants():
    verdicts = [
        check("SELECT a FROM t WHERE x = 1 OR 1=1"),
        check("please do something"),
        check(FLAGSHIP),
        check("DROP TABLE t"),
    ]
    for verdict in verdicts:
        if verdict.security == BLOCK:
            assert verdict.rule_hits or verdict.classifier_used
        if not verdict.rule_hits and not verdict.classifier_used:
            assert verdict.score == 0.0


# --------------------------------------------------------------- classifier


def test_classifier_prompt_asset():
    from sqlgate.checker.engine import classifier_prompt

    prompt = classifier_prompt("SELECT a FROM t -- probe")
    assert "SELECT a FROM t -- probe" in prompt
    assert '"malicious" or "benign"' in prompt


def test_classifier_reply_mapping():
    assert parse_classifier_reply("malicious") == 1.0
    assert parse_classifier_reply("  Benign.  ") == 0.0
    assert parse_classifier_reply("0.85") == 0.85
    assert parse_classifier_reply("7") == 1.0  # clamped
    with pytest.raises(ClassifierUnparseable):
        parse_classifier_reply("no idea")


def test_classify_remote_against_stub():
    with StubServer(reply="malicious") as stub:
        assert classify_remote("DROP TABLE t", stub.endpoint, timeout_s=5) == 1.0
    with StubServer(reply="benign") as stub:
        assert classify_remote("SELECT 1", stub.endpoint, timeout_s=5) == 0.0


def test_classifier_blocks_above_threshold(patent_schema):
    with StubServer(reply="malicious") as stub:
        classifier = remote_classifier(stub.endpoint, timeout_s=5)
        verdict = check("SELECT a FROM t WHERE b = 1", classifier=classifier)
    assert verdict.classifier_used
    assert verdict.security == BLOCK
    assert verdict.score == 1.0
    assert verdict.rule_hits == []  # block came from the classifier alone


def test_classifier_degrades_to_rules_only():
    classifier = remote_classifier("http://127.0.0.1:9", timeout_s=1)
    with_down = check(FLAGSHIP, classifier=classifier)
    rules_only = check(FLAGSHIP)
    assert not with_down.classifier_used
    assert with_down.security == rules_only.security
    assert with_down.score == rules_only.score

    blocked = check("SELECT * FROM t WHERE a='a' OR 1=1", classifier=classifier)
    assert blocked.security == BLOCK  # rules still decide


def test_classifier_garbage_reply_degrades():
    with StubServer(reply="cannot tell") as stub:
        classifier = remote_classifier(stub.endpoint, timeout_s=5)
        verdict = check(FLAGSHIP, classifier=classifier)
    assert not verdict.classifier_used
    assert verdict.security == ALLOW


def test_policy_round_trip(tmp_path):
    policy = SecurityPolicy(
        rules=frozenset({"R1", "R5"}), threshold=0.8, allow_classes=frozenset({"select"})
    )
    path = tmp_path / "policy.json"
    path.write_text(__import__("json").dumps(policy.to_json()), encoding="utf-8")
    loaded = SecurityPolicy.load(path)
    assert loaded == policy
