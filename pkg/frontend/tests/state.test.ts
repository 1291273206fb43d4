import { describe, expect, it } from "vitest";

import { SendQueue, SessionView } from "../src/state.js";
import type { ActionRecord } from "../src/types.js";

function record(seq: number, kind: ActionRecord["kind"] = "speak"): ActionRecord {
  return {
    seq,
    timestamp: "2026-03-10T08:00:00",
    kind,
    addressee: "",
    text: kind === "speak" ? `text ${seq}` : "",
    supporting_ids: [],
  };
}

describe("SessionView feed cursor", () => {
  it("advances monotonically and preserves engine order", () => {
    const view = new SessionView();
    view.applyFeed([record(0), record(1), record(2)]);
    expect(view.cursor).toBe(3);
    expect(view.actions.map((a) => a.seq)).toEqual([0, 1, 2]);
    view.applyFeed([record(3)]);
    expect(view.cursor).toBe(4);
  });

  it("ignores records it already holds", () => {
    const view = new SessionView();
    view.applyFeed([record(0), record(1)]);
    view.applyFeed([record(0), record(1)]); // engine replay of old cursor
    expect(view.actions).toHaveLength(2);
    expect(view.cursor).toBe(2);
  });

  it("refuses gaps rather than sorting client-side", () => {
    const view = new SessionView();
    expect(() => view.applyFeed([record(5)])).toThrow(/gap/);
  });

  it("reset drops everything so a refresh rebuilds from the API", () => {
    const view = new SessionView();
    view.applyFeed([record(0)]);
    view.applyRoster([{ id: "s001", name: "Alice", role: "owner", samples: 3 }], [], "visit");
    view.reset();
    expect(view.cursor).toBe(0);
    expect(view.actions).toEqual([]);
    expect(view.speakers).toEqual([]);
  });
});

describe("SendQueue", () => {
  it("sends immediately when idle", () => {
    const queue = new SendQueue();
    const item = { speaker: "Alice", text: "hi", marker: "respond" };
    expect(queue.submit(item)).toBe(item);
    expect(queue.busy).toBe(true);
  });

  it("queues while one send is in flight and releases in order", () => {
    const queue = new SendQueue();
    queue.submit({ speaker: "a", text: "1", marker: "silent" });
    expect(queue.submit({ speaker: "a", text: "2", marker: "silent" })).toBeNull();
    expect(queue.submit({ speaker: "a", text: "3", marker: "silent" })).toBeNull();
    expect(queue.pending).toBe(2);
    expect(queue.acknowledge()?.text).toBe("2");
    expect(queue.acknowledge()?.text).toBe("3");
    expect(queue.acknowledge()).toBeNull();
    expect(queue.busy).toBe(false);
  });
});
