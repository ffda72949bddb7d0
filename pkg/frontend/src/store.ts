/**
 * Client-side scene store. The server is the single source of truth: the
 * store never mutates objects locally, it only folds deltas from the event
 * feed (the same fold the service's own tests verify against GET /state).
 */

import type { AuthoringDoc, FeedEvent, ObjectDoc, SceneDelta } from "./types.js";

export function applyDelta(doc: AuthoringDoc, delta: SceneDelta): AuthoringDoc {
  const removed = new Set(delta.removed ?? []);
  const updates = new Map<string, ObjectDoc>();
  for (const od of delta.updated ?? []) updates.set(od.name, od);

  const objects = doc.objects
    .filter((od) => !removed.has(od.name))
    .map((od) => updates.get(od.name) ?? od)
    .concat(delta.created ?? []);

  return {
    objects,
    triggers: delta.triggers ?? doc.triggers,
    step: delta.step ?? doc.step,
  };
}

export interface TickerEntry {
  seq: number;
  text: string;
}

export class SceneStore {
  doc: AuthoringDoc = { objects: [], triggers: [], step: 0 };
  ticker: TickerEntry[] = [];
  lastSeq = -1;
  private listeners: Array<(store: SceneStore) => void> = [];

  /** Replace the whole document (initial GET /state before streaming). */
  reset(doc: AuthoringDoc): void {
    this.doc = { objects: doc.objects, triggers: doc.triggers, step: doc.step };
    this.notify();
  }

  onChange(listener: (store: SceneStore) => void): void {
    this.listeners.push(listener);
  }

  /** Fold one feed event; duplicate or stale sequence numbers are ignored. */
  apply(event: FeedEvent): void {
    if (event.seq <= this.lastSeq) return;
    this.lastSeq = event.seq;
    if (event.type === "delta") {
      this.doc = applyDelta(this.doc, event.delta);
    } else if (event.type === "tick") {
      if (event.delta && Object.keys(event.delta).length > 0) {
        this.doc = applyDelta(this.doc, event.delta);
      }
      for (const fired of event.fired) {
        this.ticker.push({ seq: event.seq, text: `${fired.event} on ${fired.object}` });
      }
      if (this.ticker.length > 50) this.ticker.splice(0, this.ticker.length - 50);
    }
    this.notify();
  }

  object(name: string): ObjectDoc | undefined {
    return this.doc.objects.find((od) => od.name === name);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this);
  }
}
