// DOM wiring: one poll loop, one send queue, everything else re-renders
// from what the engine returns.

import { EngineApi } from "./api.js";
import {
  renderBanner,
  renderFeed,
  renderMemoryHits,
  renderRoster,
  renderStats,
  renderSummary,
  renderTranscripts,
} from "./render.js";
import { SendQueue, SessionView } from "./state.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("engine") ?? "http://127.0.0.1:8750";
const api = new EngineApi(base);
const view = new SessionView();
const queue = new SendQueue();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const feedEl = el<HTMLDivElement>("feed");
const rosterEl = el<HTMLDivElement>("roster");
const statsEl = el<HTMLDivElement>("stats");
const bannerEl = el<HTMLDivElement>("banner");
const speakerSel = el<HTMLSelectElement>("speaker");
const markerSel = el<HTMLSelectElement>("marker");
const textInput = el<HTMLInputElement>("utterance");
const sendBtn = el<HTMLButtonElement>("send");

let pollBusy = false;
let reachable = true;

function setReachable(ok: boolean): void {
  if (ok === reachable) return;
  reachable = ok;
  bannerEl.innerHTML = ok ? "" : renderBanner("engine unreachable — inputs disabled");
  for (const input of document.querySelectorAll("input, button, select")) {
    (input as HTMLInputElement).disabled = !ok;
  }
}

function refreshRosterOptions(): void {
  const current = speakerSel.value;
  const options = [
    ...view.speakers.map((s) => ({ value: s.name, label: `${s.name} (${s.role})` })),
    ...view.clusters.map((c) => ({ value: c.id, label: `${c.id} (unnamed)` })),
    { value: "new guest", label: "new guest" },
  ];
  speakerSel.innerHTML = options
    .map((o) => `<option value="${o.value}">${o.label}</option>`)
    .join("");
  if ([...speakerSel.options].some((o) => o.value === current)) {
    speakerSel.value = current;
  }
}

async function poll(): Promise<void> {
  if (pollBusy) return; // at most one in-flight poll
  pollBusy = true;
  try {
    const records = await api.actions(view.cursor);
    view.applyFeed(records);
    const stats = await api.stats();
    view.applyRoster(stats.speakers, stats.clusters, stats.session);
    feedEl.innerHTML = renderFeed(view.actions);
    rosterEl.innerHTML = renderRoster(view.speakers, view.clusters);
    statsEl.innerHTML = renderStats(stats);
    refreshRosterOptions();
    setReachable(true);
  } catch {
    setReachable(false);
  } finally {
    pollBusy = false;
  }
}

async function dispatch(item: { speaker: string; text: string; marker: string }): Promise<void> {
  try {
    await api.sendUtterance(item.speaker, item.text, item.marker);
  } catch {
    setReachable(false);
  }
  const next = queue.acknowledge();
  if (next) void dispatch(next);
  void poll();
}

sendBtn.addEventListener("click", () => {
  const text = textInput.value.trim();
  if (!text) return;
  textInput.value = "";
  const speaker = speakerSel.value === "new guest" ? `guest-${Date.now()}` : speakerSel.value;
  const ready = queue.submit({ speaker, text, marker: markerSel.value });
  if (ready) void dispatch(ready);
});
textInput.addEventListener("keydown", (ev) => {
  if (ev.key === "Enter") sendBtn.click();
});

el<HTMLButtonElement>("clock-send").addEventListener("click", () => {
  const ts = el<HTMLInputElement>("clock").value.trim();
  if (ts) void api.advanceClock(ts).then(poll, () => setReachable(false));
});

el<HTMLButtonElement>("session-send").addEventListener("click", () => {
  const session = el<HTMLInputElement>("session").value.trim();
  if (session) void api.openSession(session).then(poll, () => setReachable(false));
});

el<HTMLButtonElement>("sensor-send").addEventListener("click", () => {
  const kind = el<HTMLSelectElement>("sensor-kind").value;
  const room = el<HTMLInputElement>("sensor-room").value.trim() || null;
  const valueRaw = el<HTMLInputElement>("sensor-value").value.trim();
  const alert = el<HTMLInputElement>("sensor-alert").checked;
  const value = valueRaw.includes(",")
    ? valueRaw.split(",").map(Number)
    : Number(valueRaw || "1");
  void api.sendSensor(kind, room, value, alert).then(poll, () => setReachable(false));
});

el<HTMLButtonElement>("memory-send").addEventListener("click", () => {
  const query = el<HTMLInputElement>("memory-q").value.trim();
  if (!query) return;
  api.memorySearch(query, 8).then(
    (hits) => {
      el<HTMLDivElement>("memory-results").innerHTML = renderMemoryHits(hits);
    },
    () => setReachable(false),
  );
});

el<HTMLButtonElement>("summary-send").addEventListener("click", () => {
  const session = el<HTMLInputElement>("summary-session").value.trim() || view.session;
  const role = el<HTMLSelectElement>("summary-role").value;
  api.summary(session, role).then(
    (result) => {
      el<HTMLDivElement>("summary-view").innerHTML = renderSummary(result);
    },
    () => setReachable(false),
  );
});

el<HTMLButtonElement>("transcripts-send").addEventListener("click", () => {
  const session = el<HTMLInputElement>("transcripts-session").value.trim() || view.session;
  api.transcripts(session).then(
    (rows) => {
      el<HTMLDivElement>("timeline").innerHTML = renderTranscripts(rows);
    },
    () => setReachable(false),
  );
});

void poll();
window.setInterval(() => void poll(), 1000);
