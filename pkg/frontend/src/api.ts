// Thin client over the gateway JSON API. The console is served by the
// gateway itself, so everything is same-origin by default.

import type { QueryResponse, GenerateResponse, SchemaDoc, Verdict } from "./types.js";

export class GatewayError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly stage?: string,
  ) {
    super(message);
  }
}

async function call<T>(base: string, path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(base + path, init);
  } catch (err) {
    throw new GatewayError(`gateway unreachable: ${String(err)}`, 0);
  }
  let payload: unknown = null;
  try {
    payload = await response.json();
  } catch {
    throw new GatewayError(`gateway returned non-JSON (${response.status})`, response.status);
  }
  if (!response.ok) {
    const doc = payload as { error?: string; stage?: string };
    throw new GatewayError(doc.error ?? `HTTP ${response.status}`, response.status, doc.stage);
  }
  return payload as T;
}

function post(body: unknown): RequestInit {
  return {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  };
}

export class GatewayClient {
  constructor(readonly base: string = "") {}

  submitQuery(nl: string): Promise<QueryResponse> {
    return call<QueryResponse>(this.base, "/api/query", post({ nl }));
  }

  /** Edited SQL still takes the full checker gate on the gateway side. */
  submitSql(sql: string): Promise<QueryResponse> {
    return call<QueryResponse>(this.base, "/api/query", post({ sql }));
  }

  check(sql: string): Promise<Verdict> {
    return call<Verdict>(this.base, "/api/check", post({ sql }));
  }

  generate(nl: string): Promise<GenerateResponse> {
    return call<GenerateResponse>(this.base, "/api/generate", post({ nl }));
  }

  schema(): Promise<SchemaDoc> {
    return call<SchemaDoc>(this.base, "/api/schema");
  }

  async healthy(): Promise<boolean> {
    try {
      await call<{ status: string }>(this.base, "/health");
      return true;
    } catch {
      return false;
    }
  }
}
