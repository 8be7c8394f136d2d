// HTML renderers. Pure string functions so they are testable without a
// browser; main.ts assigns the results to panel elements.

import { fmt, latestBelief, ScrubView, ViewModel } from "./state.js";
import type { Anchor, Candidate, Gap, ReportDoc, SlotValue, TurnUpdate } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderBeliefBars(dist: number[], labels: string[]): string {
  const rows = dist.map((p, i) => {
    const label = escapeHtml(labels[i] ?? `h${i + 1}`);
    const width = Math.round(p * 100);
    return `<div class="belief-row" data-hyp="${label}">` +
      `<span class="belief-label">${label}</span>` +
      `<div class="belief-bar" style="width:${width}%"></div>` +
      `<span class="belief-value">${fmt(p)}</span></div>`;
  });
  return `<div class="belief-bars">${rows.join("")}</div>`;
}

export function renderBeliefSeries(series: number[][], labels: string[]): string {
  const turns = series.map((dist, t) =>
    `<div class="belief-turn" data-turn="${t + 1}">${renderBeliefBars(dist, labels)}</div>`);
  return `<div class="belief-series">${turns.join("")}</div>`;
}

export function renderTurn(update: TurnUpdate): string {
  const utterances = update.utterances.map((u) => {
    const mark = u.terminal_mark === "question" ? "?" : ".";
    return `<li class="utterance ${u.role}">${escapeHtml(u.text)}${mark}</li>`;
  }).join("");
  const events = update.events.map((e) =>
    `<li class="event ${e.polarity}">${escapeHtml(e.field_id)} = ${escapeHtml(e.value)} (${e.polarity})</li>`
  ).join("");
  return `<section class="turn" data-turn="${update.turn}">` +
    `<h4>turn ${update.turn} · ${escapeHtml(update.role)}</h4>` +
    `<ol class="utterances">${utterances}</ol>` +
    `<ul class="events">${events}</ul></section>`;
}

export function renderGaps(gaps: Gap[]): string {
  if (!gaps.length) {
    return `<p class="gaps-empty">no open gaps</p>`;
  }
  const items = gaps.map((g) =>
    `<li class="gap ${g.kind}">${escapeHtml(g.kind)}: ${escapeHtml(g.target)}</li>`).join("");
  return `<ul class="gaps">${items}</ul>`;
}

export function renderCandidates(candidates: Candidate[], selectedId: string | null): string {
  const rows = candidates.map((c) => {
    const cls = c.action_id === selectedId ? "candidate selected" : "candidate";
    return `<tr class="${cls}" data-action="${escapeHtml(c.action_id)}">` +
      `<td>${escapeHtml(c.kind)}</td><td>${escapeHtml(c.target ?? "")}</td>` +
      `<td>${fmt(c.eig)}</td><td>${fmt(c.h_bar)}</td><td>${fmt(c.v)}</td></tr>`;
  }).join("");
  return `<table class="candidates"><thead><tr>` +
    `<th>kind</th><th>target</th><th>eig</th><th>h_bar</th><th>v</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderAnchorInspector(anchor: Anchor | null, blockText: string | null): string {
  if (!anchor) {
    return `<p class="anchor-empty">select an anchor chip to inspect its source</p>`;
  }
  const where = `${anchor.document_id} · page ${anchor.page_no} · ${anchor.block_id} ` +
    `· chars ${anchor.span[0]}-${anchor.span[1]}`;
  const body = blockText === null ? "" : `<blockquote>${escapeHtml(blockText)}</blockquote>`;
  return `<div class="anchor-inspector"><code>${escapeHtml(where)}</code>${body}</div>`;
}

export function renderSlots(slots: Record<string, SlotValue>): string {
  const keys = Object.keys(slots).sort();
  if (!keys.length) {
    return `<p class="slots-empty">no state recorded yet</p>`;
  }
  const rows = keys.map((k) => {
    const s = slots[k];
    const temporal = s.temporal ? ` · ${escapeHtml(s.temporal)}` : "";
    return `<tr data-field="${escapeHtml(k)}"><td>${escapeHtml(k)}</td>` +
      `<td>${escapeHtml(s.value)}</td><td class="${s.polarity}">${s.polarity}${temporal}</td>` +
      `<td>turn ${s.source_turn}</td></tr>`;
  }).join("");
  return `<table class="slots"><tbody>${rows}</tbody></table>`;
}

export function renderReport(report: ReportDoc | null): string {
  if (!report) {
    return `<p class="report-empty">report preview appears as the session builds</p>`;
  }
  const sections = report.narrative_sections.map(([sid, text]) =>
    `<section class="report-section" data-section="${escapeHtml(sid)}">` +
    `<h5>${escapeHtml(sid)}</h5><pre>${escapeHtml(text)}</pre></section>`).join("");
  return `<article class="report">${sections}</article>`;
}

export function renderScrubView(view: ScrubView, labels: string[]): string {
  const belief = view.belief ? renderBeliefBars(view.belief, labels) : "";
  const actions = view.selected.map((a) =>
    `<li data-turn="${a.turn}">${escapeHtml(a.action_id)}</li>`).join("");
  return `<div class="scrub-view" data-position="${view.turn}">` +
    `${belief}${renderSlots(view.slots)}<ol class="actions">${actions}</ol>` +
    `${renderReport(view.report)}</div>`;
}

export function renderStatus(model: ViewModel): string {
  if (!model.session) {
    return `<span class="status none">no session</span>`;
  }
  const s = model.session;
  const error = model.lastError ? ` <span class="error">${escapeHtml(model.lastError)}</span>` : "";
  return `<span class="status ${s.status}">${escapeHtml(s.case_id)} · turn ${s.turn} · ${s.status}</span>${error}`;
}

export function renderLive(model: ViewModel): string {
  const last = model.turns[model.turns.length - 1];
  const belief = renderBeliefBars(latestBelief(model), model.hypotheses);
  const turns = model.turns.map(renderTurn).join("");
  const gaps = last ? renderGaps(last.gaps) : renderGaps([]);
  const candidates = last
    ? renderCandidates(last.candidates, last.selected_action?.action_id ?? null)
    : "";
  const suggestion = last?.selected_action
    ? `<p class="suggestion">${escapeHtml(last.selected_action.prompt_text)}</p>`
    : "";
  return `<div class="live">${belief}${gaps}${candidates}${suggestion}` +
    `<div class="transcript">${turns}</div></div>`;
}
