import { describe, expect, it } from "vitest";
import { SceneStore, applyDelta } from "../src/store.js";
import type { AuthoringDoc, FeedEvent, ObjectDoc } from "../src/types.js";

function obj(name: string, extra: Partial<ObjectDoc> = {}): ObjectDoc {
  return {
    id: name,
    name,
    kind: "cube",
    position: { x: 0, y: 0, z: 0 },
    rotation: { yaw: 0, pitch: 0, roll: 0 },
    size: { w: 0.5, h: 0.5, d: 0.5 },
    color: { r: 1, g: 1, b: 1, a: 1 },
    illuminated: false,
    luminousIntensity: 5,
    levitated: false,
    wallMounted: null,
    ...extra,
  };
}

const empty: AuthoringDoc = { objects: [], triggers: [], step: 0 };

describe("applyDelta", () => {
  it("appends created objects in order", () => {
    const doc = applyDelta(empty, { created: [obj("a"), obj("b")], step: 1 });
    expect(doc.objects.map((o) => o.name)).toEqual(["a", "b"]);
    expect(doc.step).toBe(1);
  });

  it("replaces updated objects in place and keeps order", () => {
    const base = applyDelta(empty, { created: [obj("a"), obj("b")] });
    const doc = applyDelta(base, { updated: [obj("a", { illuminated: true })] });
    expect(doc.objects.map((o) => o.name)).toEqual(["a", "b"]);
    expect(doc.objects[0].illuminated).toBe(true);
  });

  it("removes objects and swaps trigger lists wholesale", () => {
    const base = applyDelta(empty, { created: [obj("a"), obj("b")] });
    const doc = applyDelta(base, {
      removed: ["a"],
      triggers: [{ object: "b", event: "OnNearEnter", handler: "P.H", enabled: true, index: 1 }],
    });
    expect(doc.objects.map((o) => o.name)).toEqual(["b"]);
    expect(doc.triggers).toHaveLength(1);
  });

  it("does not mutate its input", () => {
    const base = applyDelta(empty, { created: [obj("a")] });
    applyDelta(base, { removed: ["a"] });
    expect(base.objects).toHaveLength(1);
  });

  it("folding a commit sequence reproduces the final document", () => {
    // mirrors the service invariant: fold(deltas) == GET /state
    let doc = empty;
    const deltas = [
      { created: [obj("table-1", { kind: "table" })], step: 1 },
      { created: [obj("lamp-1", { kind: "lamp", position: { x: 0, y: 0.8, z: 0 } })], step: 2 },
      { updated: [obj("lamp-1", { kind: "lamp", illuminated: true })], step: 3 },
    ];
    for (const delta of deltas) doc = applyDelta(doc, delta);
    expect(doc.step).toBe(3);
    expect(doc.objects.map((o) => o.name)).toEqual(["table-1", "lamp-1"]);
    expect(doc.objects[1].illuminated).toBe(true);
  });
});

describe("SceneStore", () => {
  it("ignores duplicate sequence numbers (exactly-once folding)", () => {
    const store = new SceneStore();
    const event: FeedEvent = { seq: 0, type: "delta", turn: 0, delta: { created: [obj("a")] } };
    store.apply(event);
    store.apply(event);
    expect(store.doc.objects).toHaveLength(1);
  });

  it("keeps a bounded trigger ticker from tick events", () => {
    const store = new SceneStore();
    for (let i = 0; i < 60; i++) {
      store.apply({
        seq: i,
        type: "tick",
        tick: i,
        fired: [{ object: "chair-1", event: "OnNearEnter", handler: "P.H" }],
        delta: {},
      });
    }
    expect(store.ticker.length).toBeLessThanOrEqual(50);
    expect(store.ticker.at(-1)?.text).toContain("OnNearEnter");
  });

  it("never changes state except through folded events", () => {
    const store = new SceneStore();
    store.reset({ objects: [obj("a")], triggers: [], step: 4 });
    const before = JSON.stringify(store.doc);
    store.apply({ seq: -5, type: "delta", turn: 0, delta: { removed: ["a"] } } as FeedEvent);
    expect(JSON.stringify(store.doc)).toBe(before); // stale seq ignored
  });

  it("notifies listeners on change", () => {
    const store = new SceneStore();
    let calls = 0;
    store.onChange(() => calls++);
    store.apply({ seq: 0, type: "delta", turn: 0, delta: {} });
    expect(calls).toBe(1);
  });
});
