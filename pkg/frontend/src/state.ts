// View model and reducers. All truth lives server-side: these functions
// only fold service payloads (TurnUpdates, snapshots, trace records) into
// render-ready structures.

import type {
  Anchor, ReportDoc, SelectedAction, SessionHandle, SlotValue, TraceRecord,
  TurnUpdate, Utterance,
} from "./types.js";

export interface ViewModel {
  session: SessionHandle | null;
  turns: TurnUpdate[];
  beliefSeries: number[][]; // smoothed distribution per turn
  hypotheses: string[];
  lastError: string | null;
  inspectedAnchor: Anchor | null;
  scrubPosition: number | null; // null = live view
}

export function emptyModel(hypotheses: string[] = []): ViewModel {
  return {
    session: null,
    turns: [],
    beliefSeries: [],
    hypotheses,
    lastError: null,
    inspectedAnchor: null,
    scrubPosition: null,
  };
}

export function applySession(model: ViewModel, session: SessionHandle): ViewModel {
  return { ...model, session, lastError: null };
}

/** Append one TurnUpdate; stale or duplicate turn indexes are discarded. */
export function applyTurnUpdate(model: ViewModel, update: TurnUpdate): ViewModel {
  const lastTurn = model.turns.length ? model.turns[model.turns.length - 1].turn : 0;
  if (update.turn <= lastTurn) {
    return model;
  }
  return {
    ...model,
    session: update.session ?? model.session,
    turns: [...model.turns, update],
    beliefSeries: [...model.beliefSeries, update.belief.smoothed],
    lastError: null,
  };
}

export function applyError(model: ViewModel, message: string): ViewModel {
  return { ...model, lastError: message };
}

export function inspectAnchor(model: ViewModel, anchor: Anchor | null): ViewModel {
  return { ...model, inspectedAnchor: anchor };
}

export function setScrub(model: ViewModel, position: number | null): ViewModel {
  return { ...model, scrubPosition: position };
}

/** Turn entry is allowed only on an open session in the live view. */
export function canSubmit(model: ViewModel): boolean {
  return model.session !== null && model.session.status === "open"
    && model.scrubPosition === null;
}

export function latestBelief(model: ViewModel): number[] {
  return model.beliefSeries.length
    ? model.beliefSeries[model.beliefSeries.length - 1]
    : [];
}

/** Display precision for belief bars and scores. */
export function fmt(x: number): string {
  return x.toFixed(3);
}

export interface ScrubView {
  turn: number;
  utterances: Array<Utterance & { turn: number }>;
  slots: Record<string, SlotValue>;
  belief: number[] | null;
  beliefSeries: number[][];
  selected: Array<SelectedAction & { turn: number }>;
  report: ReportDoc | null;
}

/** Rebuild all panels from the trace records with turn <= position.
 * Pure function of the record prefix: scrubbing back and forth must
 * render identically on every visit. */
export function scrubView(records: TraceRecord[], position: number): ScrubView {
  const view: ScrubView = {
    turn: position,
    utterances: [],
    slots: {},
    belief: null,
    beliefSeries: [],
    selected: [],
    report: null,
  };
  for (const record of records) {
    if (record.turn > position && record.record_kind !== "report_delta") {
      continue;
    }
    const payload = record.payload as Record<string, any>;
    switch (record.record_kind) {
      case "utterance":
        for (const u of (payload.utterances ?? []) as Utterance[]) {
          view.utterances.push({ ...u, turn: record.turn });
        }
        break;
      case "events":
        for (const ev of (payload.events ?? []) as Array<Record<string, any>>) {
          view.slots[ev.field_id as string] = {
            value: ev.value as string,
            polarity: ev.polarity as string,
            temporal: (ev.temporal ?? null) as string | null,
            source_turn: ev.source_turn as number,
          };
        }
        break;
      case "belief_snapshot":
        view.belief = payload.smoothed as number[];
        view.beliefSeries.push(payload.smoothed as number[]);
        break;
      case "selected_action":
        view.selected.push({
          action_id: payload.action_id,
          kind: payload.kind,
          target: payload.target ?? null,
          prompt_text: payload.prompt_text,
          eig: payload.eig ?? null,
          anchors: [],
          turn: record.turn,
        });
        break;
      case "report_delta":
        // The closing report reflects the whole session; only show it when
        // the scrub position has reached the final recorded turn.
        if (record.turn <= position || position >= maxTurn(records)) {
          view.report = payload.report as ReportDoc;
        }
        break;
    }
  }
  return view;
}

export function maxTurn(records: TraceRecord[]): number {
  let max = 0;
  for (const r of records) {
    if (r.turn > max) max = r.turn;
  }
  return max;
}

/** Parse the JSONL body of GET /sessions/{id}/trace. */
export function parseTrace(text: string): TraceRecord[] {
  const out: TraceRecord[] = [];
  for (const line of text.split("\n")) {
    if (!line.trim()) continue;
    const record = JSON.parse(line);
    if (record.type === "trace_header") continue;
    out.push(record as TraceRecord);
  }
  return out;
}
