import { describe, expect, it } from "vitest";
import { PromptRecorder, forwardOf, rayFloorPoint, screenRay } from "../src/gesture.js";

const CAMERA = { position: [0, 1.6, 0] as [number, number, number], yaw: 0, pitch: 0, fovDeg: 60, aspect: 2 };

describe("screenRay", () => {
  it("screen center looks straight along the gaze", () => {
    const { origin, direction } = screenRay(CAMERA, 0, 0);
    expect(origin).toEqual([0, 1.6, 0]);
    expect(direction[0]).toBeCloseTo(0, 10);
    expect(direction[1]).toBeCloseTo(0, 10);
    expect(direction[2]).toBeCloseTo(1, 10);
  });

  it("right edge of the screen leans toward +x when facing +z", () => {
    const { direction } = screenRay(CAMERA, 1, 0);
    expect(direction[0]).toBeGreaterThan(0.5);
    expect(direction[2]).toBeGreaterThan(0);
    // horizontal half angle = atan(tan(fov/2) * aspect)
    const expected = Math.atan(Math.tan(Math.PI / 6) * 2);
    expect(Math.atan2(direction[0], direction[2])).toBeCloseTo(expected, 10);
  });

  it("top edge pitches up by half the fov", () => {
    const { direction } = screenRay(CAMERA, 0, 1);
    const pitch = Math.asin(direction[1]);
    expect(pitch).toBeCloseTo(Math.PI / 6, 10);
  });

  it("respects camera yaw", () => {
    const { direction } = screenRay({ ...CAMERA, yaw: 90 }, 0, 0);
    expect(direction[0]).toBeCloseTo(1, 10);
    expect(direction[2]).toBeCloseTo(0, 10);
  });

  it("rays stay unit length", () => {
    for (const [x, y] of [[-1, -1], [1, -1], [0.3, 0.7], [1, 1]] as const) {
      const { direction } = screenRay({ ...CAMERA, yaw: 33, pitch: -20 }, x, y);
      expect(Math.hypot(...direction)).toBeCloseTo(1, 10);
    }
  });
});

describe("rayFloorPoint", () => {
  it("matches the closed-form intersection", () => {
    const origin: [number, number, number] = [0.5, 1.6, -0.2];
    const direction: [number, number, number] = [0.1, -0.8, 0.3];
    const n = Math.hypot(...direction);
    const unit = direction.map((c) => c / n) as [number, number, number];
    const hit = rayFloorPoint(origin, unit)!;
    const t = 1.6 / (0.8 / n);
    expect(hit[0]).toBeCloseTo(0.5 + t * unit[0], 10);
    expect(hit[1]).toBe(0);
    expect(hit[2]).toBeCloseTo(-0.2 + t * unit[2], 10);
  });

  it("returns null for level or upward rays", () => {
    expect(rayFloorPoint([0, 1.6, 0], [1, 0, 0])).toBeNull();
    expect(rayFloorPoint([0, 1.6, 0], [0, 0.5, 1])).toBeNull();
  });
});

describe("forwardOf", () => {
  it("matches the engine yaw/pitch convention", () => {
    expect(forwardOf(0, 0)[2]).toBeCloseTo(1, 10);
    expect(forwardOf(90, 0)[0]).toBeCloseTo(1, 10);
    expect(forwardOf(0, 90)[1]).toBeCloseTo(1, 10);
  });
});

describe("PromptRecorder", () => {
  function clock(start = 1000) {
    let now = start;
    return { now: () => now, advance: (ms: number) => (now += ms) };
  }

  it("stamps each word once, at typing time", () => {
    const c = clock();
    const recorder = new PromptRecorder(c.now);
    recorder.textChanged("put");
    c.advance(200);
    recorder.textChanged("put a");
    c.advance(200);
    recorder.textChanged("put a desk");
    c.advance(300);
    recorder.textChanged("put a desk here");
    const payload = recorder.finish("put a desk here");
    expect(payload.tokenTimestamps).toHaveLength(4);
    expect(payload.tokenTimestamps[0]).toBe(0);
    expect(payload.tokenTimestamps[3]).toBe(700);
  });

  it("gesture timestamps share the clock and stay monotonic", () => {
    const c = clock();
    const recorder = new PromptRecorder(c.now);
    recorder.textChanged("put");
    c.advance(100);
    const g1 = recorder.pointAt([0, 1.6, 0], [0, -1, 1]);
    const g2 = recorder.pointAt([0, 1.6, 0], [0.1, -1, 1]); // same instant
    expect(g1.t).toBe(100);
    expect(g2.t).toBeGreaterThan(g1.t);
    const payload = recorder.finish("put that");
    const times = [...payload.tokenTimestamps, ...payload.gestures.map((g) => g.t)];
    expect(payload.gestures).toHaveLength(2);
    expect(Math.min(...times)).toBeGreaterThanOrEqual(0);
  });

  it("deleted words lose their stamps", () => {
    const c = clock();
    const recorder = new PromptRecorder(c.now);
    recorder.textChanged("make the lamp");
    recorder.textChanged("make the");
    const payload = recorder.finish("make the");
    expect(payload.tokenTimestamps).toHaveLength(2);
  });

  it("finish resets the window", () => {
    const c = clock();
    const recorder = new PromptRecorder(c.now);
    recorder.textChanged("hello there");
    recorder.pointAt([0, 1.6, 0], [0, -1, 1]);
    recorder.finish("hello there");
    c.advance(5000);
    recorder.textChanged("next");
    const payload = recorder.finish("next");
    expect(payload.tokenTimestamps).toEqual([0]);
    expect(payload.gestures).toHaveLength(0);
  });
});
