"""Operator command line.

Subcommands wrap the library modules one-to-one; every run is
deterministic under its seed and writes only to declared paths. Exit
codes: 0 success, 1 operational error (one JSON line on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from sqlgate import __version__
from sqlgate.augment import load_open_corpus, load_templates, expand, mix, write_pairs_jsonl
from sqlgate.checker import DEFAULT_POLICY, SecurityPolicy
from sqlgate.datagen import DEFAULT_ROWS, DEFAULT_SEED, write_demo_data
from sqlgate.errors import SqlgateError
from sqlgate.evaluation import (
    load_injection_corpus,
    run_checker_eval,
    run_eval,
    write_checker_report,
    write_roc_points,
)
from sqlgate.gateway import GatewayService, load_config
from sqlgate.sql.ast import Schema
from sqlgate.storage import ShardedTable


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqlgate",
        description="Guarded natural-language-to-SQL gateway over a sharded store.",
    )
    parser.add_argument("--version", action="version", version=f"sqlgate {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo-data", help="regenerate the bundled demo dataset")
    demo.add_argument("--out-dir", default="data")
    demo.add_argument("--rows", type=int, default=DEFAULT_ROWS)
    demo.add_argument("--seed", type=int, default=DEFAULT_SEED)

    ingest = sub.add_parser("ingest", help="partition rows into shard snapshots")
    ingest.add_argument("--schema", required=True, help="schema JSON file")
    ingest.add_argument("--table", required=True)
    ingest.add_argument("--file", required=True, help="CSV (header row) or JSON-lines")
    ingest.add_argument("--key", required=True, help="partition key column")
    ingest.add_argument("--shards", type=int, default=3)
    ingest.add_argument("--out", required=True, help="snapshot output directory")
    ingest.add_argument("--json", action="store_true")

    query = sub.add_parser("query", help="run one request through the pipeline")
    group = query.add_mutually_exclusive_group(required=True)
    group.add_argument("--nl", help="natural-language request")
    group.add_argument("--sql", help="raw SQL (still goes through the checker)")
    query.add_argument("--config", required=True)
    query.add_argument("--json", action="store_true")

    augment = sub.add_parser("augment", help="expand templates and mix corpora")
    augment.add_argument("--templates", nargs="+", required=True)
    augment.add_argument("--open-corpus", required=True)
    augment.add_argument("--ratio", default="1:1")
    augment.add_argument("--seed", type=int, default=0)
    augment.add_argument("--mode", choices=["cartesian", "aligned"], default="cartesian")
    augment.add_argument("--out", required=True)
    augment.add_argument("--json", action="store_true")

    nl2sql = sub.add_parser("eval-nl2sql", help="EM/EA harness over a dataset")
    nl2sql.add_argument("--dataset", required=True, help="JSON-lines eval records")
    nl2sql.add_argument("--config", required=True)
    nl2sql.add_argument("--backend", choices=["template", "remote"], default="template")
    nl2sql.add_argument("--out", required=True, help="report JSON path")
    nl2sql.add_argument("--log", help="per-record JSON-lines log path")
    nl2sql.add_argument("--json", action="store_true")

    chk = sub.add_parser("eval-checker", help="interception metrics over a corpus")
    chk.add_argument("--corpus", required=True)
    chk.add_argument("--policy", help="policy JSON (default: built-in)")
    chk.add_argument("--statement-col", default="statement")
    chk.add_argument("--label-col", default="label")
    chk.add_argument("--out", required=True, help="report JSON path")
    chk.add_argument("--roc-out", help="ROC points as delimited text")
    chk.add_argument("--json", action="store_true")

    serve = sub.add_parser("serve", help="run the HTTP gateway")
    serve.add_argument("--config", required=True)

    return parser


# ---------------------------------------------------------------- commands


def cmd_demo_data(args) -> int:
    written = write_demo_data(args.out_dir, count=args.rows, seed=args.seed)
    for name, count in sorted(written.items()):
        print(f"{name}\t{count}")
    return 0


def cmd_ingest(args) -> int:
    schema = Schema.from_json(json.loads(Path(args.schema).read_text(encoding="utf-8")))
    table = ShardedTable(schema, args.table, key_column=args.key, num_shards=args.shards)
    source = Path(args.file)
    if source.suffix == ".jsonl":
        count = table.ingest_jsonl(source)
    else:
        count = table.ingest_csv(source)
    paths = table.save_snapshots(args.out)
    if args.json:
        print(json.dumps({"ingested": count, "shard_sizes": table.shard_sizes(),
                          "snapshots": [str(p) for p in paths]}))
    else:
        print(f"ingested {count} rows into {table.num_shards} shards: {table.shard_sizes()}")
    return 0


def cmd_query(args) -> int:
    cfg = load_config(args.config)
    service = GatewayService.from_config(cfg)
    service.prober.sweep()
    try:
        if args.nl is not None:
            payload = service.handle_query(args.nl)
        else:
            payload = service.handle_sql(args.sql)
    finally:
        service.stop()
    if args.json:
        print(json.dumps(payload, sort_keys=True))
        return 0 if payload["reason"] is None else 1
    if payload["reason"] is not None:
        print(f"refused: {payload['reason']}", file=sys.stderr)
        return 1
    if payload.get("sql"):
        print(f"-- {payload['sql']}")
    print("\t".join(payload["columns"]))
    for row in payload["rows"]:
        print("\t".join(str(value) for value in row))
    return 0


def cmd_augment(args) -> int:
    domain = []
    for path in args.templates:
        for template, nls, fields in load_templates(path):
            domain.extend(expand(template, nls, fields, mode=args.mode))
    open_corpus = load_open_corpus(args.open_corpus)
    result = mix(domain, open_corpus, args.ratio, seed=args.seed)
    count = write_pairs_jsonl(result.pairs, args.out)
    summary = {
        "domain_expanded": len(domain),
        "domain_emitted": result.domain_count,
        "open_emitted": result.open_count,
        "written": count,
        "out": args.out,
    }
    print(json.dumps(summary, sort_keys=True) if args.json else
          f"wrote {count} pairs ({result.domain_count} domain + {result.open_count} open) to {args.out}")
    return 0


def _service_for_eval(config_path: str):
    cfg = load_config(config_path)
    service = GatewayService.from_config(cfg)
    service.prober.sweep()
    return cfg, service


def cmd_eval_nl2sql(args) -> int:
    cfg, service = _service_for_eval(args.config)
    try:
        if args.backend == "template":
            backend = service.template_backend
        else:
            if not cfg.remote_endpoints:
                raise SqlgateError("--backend remote needs remote_endpoints in config")
            from sqlgate.generator import RemoteBackend

            backend = RemoteBackend(cfg.remote_endpoints[0], timeout_s=cfg.remote_timeout_s)
        report = run_eval(args.dataset, backend, service.store, args.out, args.log)
    finally:
        service.stop()
    summary = {
        "total": report.total,
        "evaluated": report.evaluated,
        "skipped": report.skipped,
        "em_rate": report.em_rate,
        "ea_rate": report.ea_rate,
        "report": args.out,
    }
    print(json.dumps(summary, sort_keys=True) if args.json else
          f"EM {report.em_count}/{report.evaluated}  EA {report.ea_count}/{report.evaluated}"
          f"  skipped {report.skipped}  -> {args.out}")
    return 0


def cmd_eval_checker(args) -> int:
    corpus = load_injection_corpus(args.corpus, args.statement_col, args.label_col)
    policy = SecurityPolicy.load(args.policy) if args.policy else DEFAULT_POLICY
    report = run_checker_eval(corpus, policy)
    write_checker_report(report, args.out)
    if args.roc_out:
        write_roc_points(report, args.roc_out)
    summary = {
        "size": report["size"],
        "counts": report["counts"],
        "metrics": report["metrics"],
        "auc": report["roc"]["auc"] if report.get("roc") else None,
        "report": args.out,
    }
    if args.json:
        print(json.dumps(summary, sort_keys=True))
    else:
        counts = report["counts"]
        print(f"corpus {report['size']}: TP {counts['tp']} FP {counts['fp']} "
              f"FN {counts['fn']} TN {counts['tn']} -> {args.out}")
        print(f"metrics: {report['metrics']}")
    return 0


def cmd_serve(args) -> int:
    from sqlgate.gateway import serve_from_config

    server = serve_from_config(args.config)
    print(f"sqlgate listening on {server.address}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return 0


_COMMANDS = {
    "demo-data": cmd_demo_data,
    "ingest": cmd_ingest,
    "query": cmd_query,
    "augment": cmd_augment,
    "eval-nl2sql": cmd_eval_nl2sql,
    "eval-checker": cmd_eval_checker,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SqlgateError as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
