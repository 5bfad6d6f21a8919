// DOM wiring: the only module that touches document. One in-flight query
// per session; history is append-only and survives gateway hiccups.

import { GatewayClient, GatewayError } from "./api.js";
import {
  renderErrorBanner,
  renderHistoryItem,
  renderPipeline,
  renderSchema,
} from "./render.js";
import { ConsoleSession } from "./session.js";
import type { QueryResponse } from "./types.js";

const client = new GatewayClient("");
const session = new ConsoleSession();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const queryInput = el<HTMLTextAreaElement>("nl-input");
const submitButton = el<HTMLButtonElement>("submit");
const sqlInput = el<HTMLTextAreaElement>("sql-input");
const rerunButton = el<HTMLButtonElement>("rerun");
const pipelineView = el<HTMLDivElement>("pipeline");
const historyView = el<HTMLUListElement>("history");
const schemaView = el<HTMLDivElement>("schema");
const bannerView = el<HTMLDivElement>("banner");

let busy = false;

function setBusy(state: boolean): void {
  busy = state;
  submitButton.disabled = state;
  rerunButton.disabled = state;
}

function showResponse(nl: string | null, response: QueryResponse): void {
  bannerView.innerHTML = "";
  pipelineView.innerHTML = renderPipeline(response);
  if (response.sql !== null) {
    sqlInput.value = response.sql;
  }
  session.record(nl, response);
  renderHistory();
}

function renderHistory(): void {
  historyView.innerHTML = session.history
    .map((entry, index) => renderHistoryItem(entry, index))
    .reverse()
    .join("");
}

function showError(err: unknown): void {
  const message =
    err instanceof GatewayError
      ? `gateway error: ${err.message}${err.stage ? ` (stage ${err.stage})` : ""}`
      : `unexpected error: ${String(err)}`;
  bannerView.innerHTML = renderErrorBanner(message);
}

async function submitQuery(): Promise<void> {
  const nl = queryInput.value.trim();
  if (!nl || busy) return;
  setBusy(true);
  try {
    showResponse(nl, await client.submitQuery(nl));
  } catch (err) {
    showError(err); // history preserved on gateway failure
  } finally {
    setBusy(false);
  }
}

async function rerunEdited(): Promise<void> {
  const sql = sqlInput.value.trim();
  if (!sql || busy) return;
  setBusy(true);
  try {
    // surface the verdict even before execution, then run the full
    // pipeline; the gateway re-checks regardless (no bypass path)
    await client.check(sql);
    showResponse(null, await client.submitSql(sql));
  } catch (err) {
    showError(err);
  } finally {
    setBusy(false);
  }
}

async function loadSchema(): Promise<void> {
  try {
    const doc = await client.schema();
    session.schema = doc;
    schemaView.innerHTML = renderSchema(doc);
  } catch (err) {
    schemaView.innerHTML = renderErrorBanner("schema unavailable");
  }
}

submitButton.addEventListener("click", () => void submitQuery());
queryInput.addEventListener("keydown", (event) => {
  if (event.key === "Enter" && !event.shiftKey) {
    event.preventDefault();
    void submitQuery();
  }
});
rerunButton.addEventListener("click", () => void rerunEdited());

void loadSchema();
