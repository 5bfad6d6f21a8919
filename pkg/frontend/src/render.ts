// Pure HTML builders for the console. No DOM access here: everything is
// a string in, string out, which keeps the rendering unit-testable.

import type {
  HistoryEntry,
  QueryResponse,
  RuleHit,
  SchemaDoc,
  Trace,
  Verdict,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Map a UTF-8 byte range (gateway rule hits) to UTF-16 char indices. */
export function byteRangeToCharRange(
  text: string,
  startByte: number,
  endByte: number,
): [number, number] {
  let bytes = 0;
  let units = 0;
  let startUnit = -1;
  let endUnit = -1;
  for (const ch of text) {
    if (startUnit < 0 && bytes >= startByte) startUnit = units;
    if (endUnit < 0 && bytes >= endByte) endUnit = units;
    const cp = ch.codePointAt(0)!;
    bytes += cp < 0x80 ? 1 : cp < 0x800 ? 2 : cp < 0x10000 ? 3 : 4;
    units += cp > 0xffff ? 2 : 1;
  }
  if (startUnit < 0) startUnit = bytes >= startByte ? units : text.length;
  if (endUnit < 0) endUnit = units;
  return [startUnit, Math.max(endUnit, startUnit)];
}

/** SQL with rule-hit ranges wrapped in <mark> tags at their byte offsets. */
export function highlightSql(sql: string, hits: RuleHit[]): string {
  const ranges = hits
    .filter((hit) => hit.end > hit.start)
    .map((hit) => {
      const [start, end] = byteRangeToCharRange(sql, hit.start, hit.end);
      return { start, end, rule: hit.rule };
    })
    .sort((a, b) => a.start - b.start || b.end - a.end);
  let cursor = 0;
  let out = "";
  for (const range of ranges) {
    if (range.start < cursor) continue; // overlapping hit already marked
    out += escapeHtml(sql.slice(cursor, range.start));
    out += `<mark class="hit" data-rule="${escapeHtml(range.rule)}" title="${escapeHtml(range.rule)}">`;
    out += escapeHtml(sql.slice(range.start, range.end));
    out += "</mark>";
    cursor = range.end;
  }
  out += escapeHtml(sql.slice(cursor));
  return out;
}

export function formatMs(seconds: number): string {
  const ms = seconds * 1000;
  return ms >= 100 ? `${Math.round(ms)} ms` : `${ms.toFixed(1)} ms`;
}

export function renderTimings(timings: Record<string, number>): string {
  const order = ["generate_s", "check_s", "execute_s", "total_s"];
  const labels: Record<string, string> = {
    generate_s: "generate",
    check_s: "check",
    execute_s: "execute",
    total_s: "total",
  };
  const parts = order
    .filter((key) => key in timings)
    .map((key) => `${labels[key]} ${formatMs(timings[key])}`);
  return `<span class="timings">${escapeHtml(parts.join(" · "))}</span>`;
}

export function verdictRules(verdict: Verdict): string[] {
  return [...new Set(verdict.rule_hits.map((hit) => hit.rule))].sort();
}

export function renderVerdictPanel(verdict: Verdict): string {
  const blocked = verdict.security === "block";
  const syntax = verdict.syntax.status;
  const chips: string[] = [];
  chips.push(
    syntax === "ok"
      ? `<span class="chip ok">syntax ok</span>`
      : `<span class="chip warn">syntax: ${escapeHtml(syntax)}</span>`,
  );
  if (verdict.classifier_used) {
    chips.push(`<span class="chip">classifier ${verdict.score.toFixed(2)}</span>`);
  }
  if (blocked) {
    const rules = verdictRules(verdict);
    const hits = verdict.rule_hits
      .map(
        (hit) =>
          `<li><code class="rule">${escapeHtml(hit.rule)}</code> ` +
          `<code>${escapeHtml(hit.fragment)}</code></li>`,
      )
      .join("");
    const named = rules.length > 0 ? rules.join(", ") : "classifier";
    return (
      `<div class="verdict blocked"><strong>Blocked</strong> by ${escapeHtml(named)}` +
      ` ${chips.join(" ")}<ul class="hits">${hits}</ul></div>`
    );
  }
  return `<div class="verdict allowed"><strong>Allowed</strong> ${chips.join(" ")}</div>`;
}

export function renderResultTable(columns: string[], rows: unknown[][]): string {
  const head = columns.map((c) => `<th>${escapeHtml(c)}</th>`).join("");
  const body = rows
    .map(
      (row) =>
        `<tr>${row.map((v) => `<td>${escapeHtml(String(v))}</td>`).join("")}</tr>`,
    )
    .join("");
  return (
    `<div class="result"><span class="rowcount">${rows.length} row${rows.length === 1 ? "" : "s"}</span>` +
    `<table><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table></div>`
  );
}

function renderSqlStage(response: QueryResponse): string {
  if (response.sql === null) {
    return `<div class="stage sql"><h3>1 · SQL</h3><p class="empty">no SQL generated</p></div>`;
  }
  const hits = response.verdict?.rule_hits ?? [];
  const backend = response.trace?.backend ?? "";
  return (
    `<div class="stage sql"><h3>1 · SQL <span class="backend">${escapeHtml(backend)}</span></h3>` +
    `<pre class="sqltext" data-sql="${escapeHtml(response.sql)}">${highlightSql(response.sql, hits)}</pre></div>`
  );
}

function renderVerdictStage(response: QueryResponse): string {
  if (response.verdict === null) {
    return `<div class="stage verdict"><h3>2 · Verdict</h3><p class="empty">not checked</p></div>`;
  }
  return `<div class="stage verdict"><h3>2 · Verdict</h3>${renderVerdictPanel(response.verdict)}</div>`;
}

function renderResultStage(response: QueryResponse): string {
  if (response.rows !== null && response.columns !== null) {
    return `<div class="stage result"><h3>3 · Result</h3>${renderResultTable(response.columns, response.rows)}</div>`;
  }
  const reason = response.reason ?? "no result";
  return `<div class="stage result"><h3>3 · Result</h3><p class="refusal">${escapeHtml(reason)}</p></div>`;
}

export function renderPipeline(response: QueryResponse): string {
  const trace: Trace = response.trace;
  return (
    `<div class="pipeline" data-request="${escapeHtml(trace.request_id)}">` +
    renderSqlStage(response) +
    renderVerdictStage(response) +
    renderResultStage(response) +
    `<div class="tracefoot">${renderTimings(trace.timings)}</div></div>`
  );
}

export function renderSchema(doc: SchemaDoc): string {
  const tables = Object.entries(doc.tables)
    .map(([name, columns]) => {
      const cols = columns
        .map(
          (col) =>
            `<li><code>${escapeHtml(col.name)}</code> <span class="ctype">${escapeHtml(col.type)}</span></li>`,
        )
        .join("");
      return `<details open><summary>${escapeHtml(name)}</summary><ul>${cols}</ul></details>`;
    })
    .join("");
  return `<div class="schema">${tables}</div>`;
}

export function renderHistoryItem(entry: HistoryEntry, index: number): string {
  const label = entry.nl ?? entry.sql ?? "(empty)";
  const status = entry.outcome === "executed" ? "ok" : "blocked";
  const detail =
    entry.outcome === "executed"
      ? `${entry.rowCount ?? 0} rows`
      : (entry.reason ?? entry.outcome);
  return (
    `<li class="history-item ${status}" data-index="${index}">` +
    `<span class="label">${escapeHtml(label)}</span>` +
    `<span class="detail">${escapeHtml(detail)}</span></li>`
  );
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}
