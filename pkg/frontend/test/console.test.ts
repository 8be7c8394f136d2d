// Console coherence against a recorded live session: the view is a pure
// renderer of service payloads, so belief bars, scrub views, and the
// concluded-session gate must all line up with the recorded wire data.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  applyError, applySession, applyTurnUpdate, canSubmit, emptyModel, fmt,
  latestBelief, maxTurn, parseTrace, scrubView, setScrub,
} from "../src/state.js";
import {
  renderBeliefBars, renderCandidates, renderGaps, renderReport,
  renderScrubView, renderSlots, renderStatus, renderTurn,
} from "../src/render.js";
import type { SessionHandle, Snapshot, TraceRecord, TurnUpdate } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));
const fixture = JSON.parse(readFileSync(join(here, "fixtures", "session_fixture.json"), "utf-8")) as {
  session: SessionHandle;
  hypotheses: string[];
  updates: TurnUpdate[];
  final_snapshot: Snapshot;
  trace_jsonl: string;
  scripted_turns: number;
};

function liveModel() {
  let model = applySession(emptyModel(fixture.hypotheses), { ...fixture.session, status: "open", turn: 0 });
  for (const update of fixture.updates) {
    model = applyTurnUpdate(model, update);
  }
  return model;
}

describe("scripted six-turn session", () => {
  it("records exactly the scripted turns and ends concluded", () => {
    expect(fixture.updates.length).toBe(6);
    expect(fixture.updates.map((u) => u.turn)).toEqual([1, 2, 3, 4, 5, 6]);
    expect(fixture.session.status).toBe("concluded");
  });

  it("belief bars equal the service smoothed vectors at display precision", () => {
    let model = applySession(emptyModel(fixture.hypotheses), { ...fixture.session, status: "open", turn: 0 });
    for (const update of fixture.updates) {
      model = applyTurnUpdate(model, update);
      const html = renderBeliefBars(latestBelief(model), model.hypotheses);
      const shown = [...html.matchAll(/belief-value">([0-9.]+)</g)].map((m) => m[1]);
      expect(shown).toEqual(update.belief.smoothed.map((p) => fmt(p)));
    }
  });

  it("belief series length tracks the turn count", () => {
    const model = liveModel();
    expect(model.beliefSeries.length).toBe(6);
    for (const dist of model.beliefSeries) {
      const total = dist.reduce((a, b) => a + b, 0);
      expect(Math.abs(total - 1)).toBeLessThan(1e-9);
    }
  });

  it("stale updates are discarded by turn index", () => {
    let model = liveModel();
    const size = model.turns.length;
    model = applyTurnUpdate(model, fixture.updates[2]); // duplicate turn 3
    expect(model.turns.length).toBe(size);
  });

  it("every selected action is highlighted among its candidates", () => {
    for (const update of fixture.updates) {
      const selected = update.selected_action;
      if (!selected) continue;
      const html = renderCandidates(update.candidates, selected.action_id);
      expect(html).toContain(`class="candidate selected" data-action="${selected.action_id}"`);
    }
  });
});

describe("replay scrub", () => {
  const records: TraceRecord[] = parseTrace(fixture.trace_jsonl);

  it("scrub to zero renders empty panels", () => {
    const view = scrubView(records, 0);
    expect(view.utterances).toEqual([]);
    expect(view.slots).toEqual({});
    expect(view.belief).toBeNull();
    expect(view.selected).toEqual([]);
  });

  it("scrub to end equals the live final snapshot", () => {
    const end = maxTurn(records);
    const view = scrubView(records, end);
    const snapshot = fixture.final_snapshot;
    // belief equals the service's final smoothed vector exactly
    expect(view.belief).toEqual(snapshot.belief);
    // slot panel matches the snapshot's state map
    expect(Object.keys(view.slots).sort()).toEqual(Object.keys(snapshot.state).sort());
    for (const [field, slot] of Object.entries(snapshot.state)) {
      expect(view.slots[field].value).toBe(slot.value);
      expect(view.slots[field].polarity).toBe(slot.polarity);
      expect(view.slots[field].source_turn).toBe(slot.source_turn);
    }
    // the closing report equals the snapshot's report document
    expect(view.report).toEqual(snapshot.report);
    // rendered panels agree too
    const html = renderScrubView(view, fixture.hypotheses);
    for (const [sid, text] of snapshot.report.narrative_sections) {
      expect(html).toContain(`data-section="${sid}"`);
      if (text !== "(none recorded)") {
        const firstLine = text.split("\n")[0];
        expect(html).toContain(firstLine.slice(0, 20));
      }
    }
  });

  it("scrub position k shows only records with turn <= k", () => {
    const mid = 3;
    const view = scrubView(records, mid);
    expect(view.utterances.every((u) => u.turn <= mid)).toBe(true);
    expect(view.selected.every((a) => a.turn <= mid)).toBe(true);
    expect(view.report).toBeNull(); // closing report only at the end
    const beliefs = records.filter(
      (r) => r.record_kind === "belief_snapshot" && r.turn <= mid);
    expect(view.belief).toEqual((beliefs[beliefs.length - 1].payload as any).smoothed);
  });

  it("scrubbing forward then back renders identically", () => {
    const a = renderScrubView(scrubView(records, 2), fixture.hypotheses);
    scrubView(records, maxTurn(records));
    const b = renderScrubView(scrubView(records, 2), fixture.hypotheses);
    expect(a).toBe(b);
  });

  it("turn updates mirror the trace records for their turn", () => {
    for (const update of fixture.updates) {
      const belief = records.find(
        (r) => r.turn === update.turn && r.record_kind === "belief_snapshot");
      expect((belief!.payload as any).smoothed).toEqual(update.belief.smoothed);
      const selected = records.find(
        (r) => r.turn === update.turn && r.record_kind === "selected_action");
      expect((selected!.payload as any).action_id).toBe(update.selected_action!.action_id);
    }
  });
});

describe("concluded-session gate", () => {
  it("turn entry is disabled once the session concludes", () => {
    const model = liveModel();
    expect(model.session?.status).toBe("concluded");
    expect(canSubmit(model)).toBe(false);
  });

  it("an in-flight rejection surfaces inline and stays disabled", () => {
    let model = liveModel();
    model = applyError(model, "SessionClosed: session is concluded");
    expect(canSubmit(model)).toBe(false);
    const html = renderStatus(model);
    expect(html).toContain("concluded");
    expect(html).toContain("SessionClosed");
  });

  it("scrub mode also disables entry on an open session", () => {
    let model = applySession(emptyModel(), { ...fixture.session, status: "open", turn: 2 });
    expect(canSubmit(model)).toBe(true);
    model = setScrub(model, 1);
    expect(canSubmit(model)).toBe(false);
  });
});

describe("renderers", () => {
  it("turn transcript escapes text and shows terminal marks", () => {
    const update = fixture.updates[0];
    const html = renderTurn(update);
    for (const u of update.utterances) {
      expect(html).toContain(u.terminal_mark === "question" ? "?" : ".");
    }
    expect(renderTurn({ ...update, utterances: [{ ...update.utterances[0], text: "a <b> c" }] }))
      .toContain("a &lt;b&gt; c");
  });

  it("gap list renders kinds and targets", () => {
    const withGaps = fixture.updates.find((u) => u.gaps.length > 0)!;
    const html = renderGaps(withGaps.gaps);
    for (const gap of withGaps.gaps) {
      expect(html).toContain(gap.target);
    }
    expect(renderGaps([])).toContain("no open gaps");
  });

  it("slots and report render the snapshot content", () => {
    const snapshot = fixture.final_snapshot;
    const slotsHtml = renderSlots(snapshot.state as any);
    for (const field of Object.keys(snapshot.state)) {
      expect(slotsHtml).toContain(`data-field="${field}"`);
    }
    const reportHtml = renderReport(snapshot.report);
    expect(reportHtml).toContain("report-section");
  });
});
