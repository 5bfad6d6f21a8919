// Console session state: an append-only history of pipeline runs plus
// the current schema snapshot. Purely presentational; closing the page
// loses nothing but this list.

import type { HistoryEntry, QueryResponse, SchemaDoc } from "./types.js";

export class ConsoleSession {
  private readonly entries: HistoryEntry[] = [];
  schema: SchemaDoc | null = null;

  record(nl: string | null, response: QueryResponse): HistoryEntry {
    const entry: HistoryEntry = {
      nl,
      sql: response.sql,
      verdict: response.verdict,
      outcome: response.trace.outcome,
      rowCount: response.trace.row_count,
      reason: response.reason,
      timings: response.trace.timings,
    };
    this.entries.push(entry);
    return entry;
  }

  get history(): readonly HistoryEntry[] {
    return this.entries;
  }

  get length(): number {
    return this.entries.length;
  }

  at(index: number): HistoryEntry | undefined {
    return this.entries[index];
  }
}
