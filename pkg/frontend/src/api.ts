// Thin typed client over the engine's loopback API. The console keeps no
// state the engine does not expose, so everything here is a plain fetch.

import type {
  ActionRecord,
  MemoryHit,
  Stats,
  SummaryResult,
  TranscriptRow,
} from "./types.js";

function parseNdjson<T>(body: string): T[] {
  return body
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as T);
}

export class EngineApi {
  constructor(readonly baseUrl: string) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await fetch(this.baseUrl + path);
    if (!resp.ok) {
      throw new Error(`GET ${path} -> ${resp.status}: ${await resp.text()}`);
    }
    return (await resp.json()) as T;
  }

  private async postJson<T>(path: string, body: unknown): Promise<T> {
    const resp = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new Error(`POST ${path} -> ${resp.status}: ${await resp.text()}`);
    }
    return (await resp.json()) as T;
  }

  async config(): Promise<Record<string, unknown>> {
    return this.getJson("/config");
  }

  async stats(): Promise<Stats> {
    return this.getJson("/stats");
  }

  async actions(cursor: number): Promise<ActionRecord[]> {
    const resp = await fetch(`${this.baseUrl}/actions?cursor=${cursor}`);
    if (!resp.ok) {
      throw new Error(`GET /actions -> ${resp.status}`);
    }
    return parseNdjson<ActionRecord>(await resp.text());
  }

  async transcripts(session?: string): Promise<TranscriptRow[]> {
    const qs = session ? `?session=${encodeURIComponent(session)}` : "";
    const resp = await fetch(`${this.baseUrl}/transcripts${qs}`);
    if (!resp.ok) {
      throw new Error(`GET /transcripts -> ${resp.status}`);
    }
    return parseNdjson<TranscriptRow>(await resp.text());
  }

  async memorySearch(query: string, k: number): Promise<MemoryHit[]> {
    const qs = `?q=${encodeURIComponent(query)}&k=${k}`;
    const resp = await fetch(`${this.baseUrl}/memory/search${qs}`);
    if (!resp.ok) {
      throw new Error(`GET /memory/search -> ${resp.status}`);
    }
    return parseNdjson<MemoryHit>(await resp.text());
  }

  async summary(session: string, role: string): Promise<SummaryResult> {
    const qs = `?session=${encodeURIComponent(session)}&role=${encodeURIComponent(role)}`;
    const resp = await fetch(`${this.baseUrl}/summary${qs}`);
    const raw = await resp.text();
    if (resp.status === 403) {
      return { kind: "denied", role };
    }
    if (!resp.ok) {
      return { kind: "error", status: resp.status, raw };
    }
    try {
      const body = JSON.parse(raw) as { summary: string };
      return { kind: "summary", role, text: body.summary };
    } catch {
      // malformed payloads surface verbatim in the debug drawer
      return { kind: "error", status: resp.status, raw };
    }
  }

  async sendUtterance(speaker: string, text: string, marker: string): Promise<void> {
    await this.postJson("/utterance", { speaker, text, marker });
  }

  async sendSensor(
    kind: string,
    room: string | null,
    value: number | number[],
    alert: boolean,
  ): Promise<void> {
    await this.postJson("/sensors", { kind, room, value, alert });
  }

  async advanceClock(timestamp: string): Promise<void> {
    await this.postJson("/clock", { timestamp });
  }

  async openSession(session: string): Promise<void> {
    await this.postJson("/session", { session });
  }
}
