/**
 * Gesture capture and prompt timing.
 *
 * A recording window opens at the first keystroke or click and closes on
 * submit. Every token and pointing sample is stamped in milliseconds since
 * the window opened, on one shared clock, so the server can match deictic
 * words ("here", "that") to the nearest pointing sample in time.
 */

import type { GestureSampleDoc } from "./types.js";

export interface CameraPose {
  position: [number, number, number]; // eye point
  yaw: number; // degrees, 0 faces +z, 90 faces +x
  pitch: number; // degrees above the horizon
  fovDeg: number; // vertical field of view
  aspect: number; // width / height
}

const rad = (deg: number) => (deg * Math.PI) / 180;

function normalize(v: [number, number, number]): [number, number, number] {
  const n = Math.hypot(v[0], v[1], v[2]);
  return [v[0] / n, v[1] / n, v[2] / n];
}

export function forwardOf(yaw: number, pitch: number): [number, number, number] {
  const cp = Math.cos(rad(pitch));
  return [cp * Math.sin(rad(yaw)), Math.sin(rad(pitch)), cp * Math.cos(rad(yaw))];
}

/**
 * Cast a ray from the camera through a screen point.
 * ndcX is -1 (left) to 1 (right); ndcY is -1 (bottom) to 1 (top).
 */
export function screenRay(
  camera: CameraPose,
  ndcX: number,
  ndcY: number,
): { origin: [number, number, number]; direction: [number, number, number] } {
  const forward = forwardOf(camera.yaw, camera.pitch);
  const right: [number, number, number] = [Math.cos(rad(camera.yaw)), 0, -Math.sin(rad(camera.yaw))];
  const up: [number, number, number] = [
    forward[1] * right[2] - forward[2] * right[1],
    forward[2] * right[0] - forward[0] * right[2],
    forward[0] * right[1] - forward[1] * right[0],
  ];
  const stretch = Math.tan(rad(camera.fovDeg) / 2);
  const sx = ndcX * stretch * camera.aspect;
  const sy = ndcY * stretch;
  const direction = normalize([
    forward[0] + right[0] * sx + up[0] * sy,
    forward[1] + right[1] * sx + up[1] * sy,
    forward[2] + right[2] * sx + up[2] * sy,
  ]);
  return { origin: [...camera.position], direction };
}

/** Where the ray meets the floor plane (y = 0), or null if it never lands. */
export function rayFloorPoint(
  origin: [number, number, number],
  direction: [number, number, number],
): [number, number, number] | null {
  if (direction[1] >= -1e-9) return null;
  const t = -origin[1] / direction[1];
  if (t <= 0) return null;
  return [origin[0] + t * direction[0], 0, origin[2] + t * direction[2]];
}

export class PromptRecorder {
  private startMs: number | null = null;
  private tokenTimes: number[] = [];
  private gestures: GestureSampleDoc[] = [];
  private lastStamp = -1;

  constructor(private now: () => number = () => performance.now()) {}

  get active(): boolean {
    return this.startMs !== null;
  }

  /** Milliseconds since the recording window opened (opens it if needed). */
  private stamp(): number {
    if (this.startMs === null) this.startMs = this.now();
    let t = this.now() - this.startMs;
    if (t <= this.lastStamp) t = this.lastStamp + 1; // timestamps stay monotonic
    this.lastStamp = t;
    return t;
  }

  /** Call on every text-input change; stamps newly appeared words. */
  textChanged(text: string): void {
    const words = text.split(/\s+/).filter((w) => w.length > 0);
    while (this.tokenTimes.length < words.length) {
      this.tokenTimes.push(this.stamp());
    }
    if (words.length < this.tokenTimes.length) {
      this.tokenTimes.length = words.length;
    }
  }

  /** Record a pointing sample (from a viewport click) on the shared clock. */
  pointAt(origin: [number, number, number], direction: [number, number, number]): GestureSampleDoc {
    const sample: GestureSampleDoc = { t: this.stamp(), origin, direction };
    this.gestures.push(sample);
    return sample;
  }

  gestureCount(): number {
    return this.gestures.length;
  }

  /** Close the window and hand back the prompt payload. */
  finish(text: string): {
    text: string;
    tokenTimestamps: number[];
    gestures: GestureSampleDoc[];
  } {
    this.textChanged(text);
    const payload = {
      text,
      tokenTimestamps: [...this.tokenTimes],
      gestures: [...this.gestures],
    };
    this.startMs = null;
    this.tokenTimes = [];
    this.gestures = [];
    this.lastStamp = -1;
    return payload;
  }
}
