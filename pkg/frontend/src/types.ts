// Payload shapes of the gateway JSON API (see docs/formats.md).

export interface RuleHit {
  rule: string;
  fragment: string;
  start: number; // byte offsets into the UTF-8 form of the checked SQL
  end: number;
  score: number;
}

export interface Verdict {
  syntax: { status: "ok" | "syntax_error" | "unsupported"; detail: string | null };
  security: "allow" | "block";
  rule_hits: RuleHit[];
  score: number;
  classifier_used: boolean;
  elapsed_s: number;
}

export interface Trace {
  request_id: string;
  backend: string | null;
  timings: Record<string, number>;
  outcome: "executed" | "refused" | "error";
  verdict?: "allow" | "block" | null;
  row_count: number | null;
  reason: string | null;
}

export interface QueryResponse {
  request_id: string;
  sql: string | null;
  verdict: Verdict | null;
  columns: string[] | null;
  rows: unknown[][] | null;
  reason: string | null;
  trace: Trace;
}

export interface GenerateResponse {
  sql: string;
  backend: string;
  prompt: string;
  elapsed_s: number;
}

export interface SchemaColumn {
  name: string;
  type: string;
}

export interface SchemaDoc {
  tables: Record<string, SchemaColumn[]>;
}

export interface HistoryEntry {
  nl: string | null; // null when the operator submitted edited SQL
  sql: string | null;
  verdict: Verdict | null;
  outcome: string;
  rowCount: number | null;
  reason: string | null;
  timings: Record<string, number>;
}
