// DOM glue: wires the service client, view-model reducers, and renderers
// into the single-page console. Push-channel messages apply in arrival
// order; stale responses are discarded by turn index inside the reducer.

import { ApiError, ServiceClient } from "./api.js";
import {
  applyError, applySession, applyTurnUpdate, canSubmit, emptyModel,
  inspectAnchor, maxTurn, parseTrace, scrubView, setScrub, ViewModel,
} from "./state.js";
import {
  renderAnchorInspector, renderLive, renderScrubView, renderStatus,
} from "./render.js";
import type { TraceRecord } from "./types.js";

const client = new ServiceClient("");
let model: ViewModel = emptyModel();
let trace: TraceRecord[] = [];
let unsubscribe: (() => void) | null = null;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function redraw(): void {
  el("status").innerHTML = renderStatus(model);
  if (model.scrubPosition !== null) {
    el("main-panel").innerHTML = renderScrubView(
      scrubView(trace, model.scrubPosition), model.hypotheses);
  } else {
    el("main-panel").innerHTML = renderLive(model);
  }
  el("anchor-panel").innerHTML = renderAnchorInspector(model.inspectedAnchor, null);
  (el("turn-input") as HTMLInputElement).disabled = !canSubmit(model);
  (el("send") as HTMLButtonElement).disabled = !canSubmit(model);
}

async function newSession(): Promise<void> {
  const caseId = (el("case-id") as HTMLInputElement).value || null;
  const handle = await client.createSession(caseId, Date.now() % 100000);
  model = applySession(emptyModel(), handle);
  trace = [];
  if (unsubscribe) unsubscribe();
  unsubscribe = client.subscribe(handle.session_id, (update) => {
    model = applyTurnUpdate(model, update);
    redraw();
  });
  redraw();
}

async function sendTurn(): Promise<void> {
  if (!model.session) return;
  const input = el("turn-input") as HTMLInputElement;
  const role = (el("role-toggle") as HTMLSelectElement).value;
  try {
    const update = await client.pushTurn(model.session.session_id, role, input.value);
    model = applyTurnUpdate(model, update);
    input.value = "";
  } catch (err) {
    model = applyError(model, err instanceof ApiError ? `${err.code}: ${err.message}` : String(err));
  }
  redraw();
}

async function loadReplay(): Promise<void> {
  if (!model.session) return;
  const body = await client.trace(model.session.session_id);
  trace = parseTrace(body);
  const scrubber = el("scrubber") as HTMLInputElement;
  scrubber.max = String(maxTurn(trace));
  scrubber.value = scrubber.max;
  model = setScrub(model, maxTurn(trace));
  redraw();
}

function wire(): void {
  el("new-session").addEventListener("click", () => void newSession());
  el("send").addEventListener("click", () => void sendTurn());
  el("load-replay").addEventListener("click", () => void loadReplay());
  el("back-to-live").addEventListener("click", () => {
    model = setScrub(model, null);
    redraw();
  });
  (el("scrubber") as HTMLInputElement).addEventListener("input", (event) => {
    const position = Number((event.target as HTMLInputElement).value);
    model = setScrub(model, position);
    redraw();
  });
  el("main-panel").addEventListener("click", (event) => {
    const chip = (event.target as HTMLElement).closest("[data-anchor]");
    if (chip) {
      model = inspectAnchor(model, JSON.parse(chip.getAttribute("data-anchor") ?? "null"));
      redraw();
    }
  });
  redraw();
}

document.addEventListener("DOMContentLoaded", wire);
