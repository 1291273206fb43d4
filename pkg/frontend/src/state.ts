// Client-side session view. Invariants: the action cursor only moves
// forward, feed order is exactly engine order (no client-side sorting),
// and user inputs queue locally until the previous send is acknowledged.

import type { ActionRecord, ClusterInfo, SpeakerInfo } from "./types.js";

export interface QueuedUtterance {
  speaker: string;
  text: string;
  marker: string;
}

export class SessionView {
  cursor = 0;
  actions: ActionRecord[] = [];
  speakers: SpeakerInfo[] = [];
  clusters: ClusterInfo[] = [];
  session = "default";

  /** Append a poll result; rejects anything that would reorder the feed. */
  applyFeed(records: ActionRecord[]): void {
    for (const record of records) {
      if (record.seq < this.cursor) {
        continue; // engine replayed something we already hold
      }
      if (record.seq !== this.cursor) {
        throw new Error(
          `gap in action feed: expected seq ${this.cursor}, got ${record.seq}`,
        );
      }
      this.actions.push(record);
      this.cursor = record.seq + 1;
    }
  }

  applyRoster(speakers: SpeakerInfo[], clusters: ClusterInfo[], session: string): void {
    this.speakers = speakers;
    this.clusters = clusters;
    this.session = session;
  }

  /** Everything rebuilds from API reads; dropping local state must be safe. */
  reset(): void {
    this.cursor = 0;
    this.actions = [];
    this.speakers = [];
    this.clusters = [];
  }
}

export class SendQueue {
  private queue: QueuedUtterance[] = [];
  private inFlight = false;

  /** Returns the utterance to send now, or null if one is already going. */
  submit(item: QueuedUtterance): QueuedUtterance | null {
    if (this.inFlight) {
      this.queue.push(item);
      return null;
    }
    this.inFlight = true;
    return item;
  }

  /** Acknowledge the in-flight send; returns the next queued item, if any. */
  acknowledge(): QueuedUtterance | null {
    const next = this.queue.shift() ?? null;
    this.inFlight = next !== null;
    return next;
  }

  get pending(): number {
    return this.queue.length;
  }

  get busy(): boolean {
    return this.inFlight;
  }
}
