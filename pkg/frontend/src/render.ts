// Pure HTML-string renderers. Keeping these DOM-free means the view logic
// is testable without a browser and main.ts is only wiring.

import type {
  ActionRecord,
  ClusterInfo,
  MemoryHit,
  SpeakerInfo,
  Stats,
  SummaryResult,
  TranscriptRow,
} from "./types.js";

export function escapeHtml(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

export function renderAction(record: ActionRecord): string {
  const ts = escapeHtml(record.timestamp);
  const addressee = record.addressee
    ? `<span class="addressee">→ ${escapeHtml(record.addressee)}</span>`
    : "";
  switch (record.kind) {
    case "ask_question":
      return (
        `<div class="action ask" data-seq="${record.seq}">` +
        `<span class="ts">${ts}</span>${addressee}` +
        `<span class="bubble">${escapeHtml(record.text)}</span></div>`
      );
    case "speak": {
      const refs = record.supporting_ids.length
        ? `<span class="refs">sources: ${record.supporting_ids
            .map(escapeHtml)
            .join(", ")}</span>`
        : "";
      return (
        `<div class="action speak" data-seq="${record.seq}">` +
        `<span class="ts">${ts}</span>${addressee}` +
        `<span class="bubble">${escapeHtml(record.text)}</span>${refs}</div>`
      );
    }
    case "store_only":
    case "stay_silent":
      return (
        `<div class="action silence" data-seq="${record.seq}">` +
        `<span class="ts">${ts}</span><span class="dot" title="stored silently">·</span></div>`
      );
    default:
      return (
        `<div class="action other" data-seq="${record.seq}">` +
        `<span class="ts">${ts}</span><span>${escapeHtml(record.kind)}</span></div>`
      );
  }
}

export function renderFeed(actions: ActionRecord[]): string {
  // engine order, verbatim; the cursor logic already guaranteed it
  return actions.map(renderAction).join("\n");
}

export function renderRoster(speakers: SpeakerInfo[], clusters: ClusterInfo[]): string {
  const rows = [
    ...speakers.map(
      (s) =>
        `<li class="registered" data-id="${escapeHtml(s.id)}">` +
        `${escapeHtml(s.name)} <span class="role">${escapeHtml(s.role)}</span></li>`,
    ),
    ...clusters.map(
      (c) =>
        `<li class="anonymous" data-id="${escapeHtml(c.id)}">` +
        `${escapeHtml(c.id)} <span class="role">unnamed</span></li>`,
    ),
  ];
  return `<ul class="roster">${rows.join("")}</ul>`;
}

export function renderSummary(result: SummaryResult): string {
  switch (result.kind) {
    case "summary":
      return (
        `<div class="summary ok"><span class="role">${escapeHtml(result.role)}</span>` +
        `<p>${escapeHtml(result.text)}</p></div>`
      );
    case "denied":
      return (
        `<div class="summary denied"><span class="role">${escapeHtml(result.role)}</span>` +
        `<p>permission denied</p></div>`
      );
    case "error":
      return (
        `<div class="summary error">engine error ${result.status}` +
        `<pre class="debug-drawer">${escapeHtml(result.raw)}</pre></div>`
      );
  }
}

export function renderTranscripts(rows: TranscriptRow[]): string {
  const blocks = rows.map(
    (t) =>
      `<div class="turn" data-speaker="${escapeHtml(t.speaker)}">` +
      `<span class="who">${escapeHtml(t.speaker)}</span>` +
      `<span class="when">${t.t_start.toFixed(1)}–${t.t_end.toFixed(1)}</span>` +
      `<span class="said">${escapeHtml(t.text) || "<em>voice</em>"}</span></div>`,
  );
  return blocks.join("\n");
}

export function renderMemoryHits(hits: MemoryHit[]): string {
  if (hits.length === 0) {
    return '<p class="empty">no matches</p>';
  }
  const rows = hits.map(
    (h) =>
      `<tr><td>${h.rank}</td><td>${h.similarity.toFixed(4)}</td>` +
      `<td>${escapeHtml(h.source)}</td><td>${escapeHtml(h.text)}</td>` +
      `<td class="item-id">${escapeHtml(h.item_id)}</td></tr>`,
  );
  return (
    "<table><thead><tr><th>#</th><th>sim</th><th>source</th><th>text</th><th>id</th></tr></thead>" +
    `<tbody>${rows.join("")}</tbody></table>`
  );
}

export function renderStats(stats: Stats): string {
  const rooms = Object.entries(stats.occupancy_seconds)
    .map(([room, secs]) => `<li>${escapeHtml(room)}: ${Math.round(secs)}s</li>`)
    .join("");
  const labels = stats.activity_labels
    .map(
      (l) =>
        `<li class="label-${escapeHtml(l.label)}">${escapeHtml(l.label)} ` +
        `${escapeHtml(l.t_start)} → ${escapeHtml(l.t_end)} (${escapeHtml(l.origin)})</li>`,
    )
    .join("");
  return (
    `<div class="stats"><p>${escapeHtml(stats.date)} · session ${escapeHtml(stats.session)}` +
    ` · sedentarization ${stats.sedentarization.toFixed(3)}` +
    (stats.latest_pose ? ` · pose ${escapeHtml(stats.latest_pose)}` : "") +
    ` · egress calls ${stats.egress_invocations}</p>` +
    `<ul class="rooms">${rooms}</ul><ul class="labels">${labels}</ul></div>`
  );
}

export function renderBanner(message: string): string {
  return `<div class="banner">${escapeHtml(message)}</div>`;
}
