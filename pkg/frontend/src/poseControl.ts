/**
 * Desktop navigation standing in for the headset: WASD moves the feet point,
 * pointer-lock mouse-look turns the head. The camera pose mirrors the
 * server-side user pose within one pose-update round trip.
 */

import { forwardOf } from "./gesture.js";
import type { PoseDoc } from "./types.js";

export interface PoseState {
  x: number;
  z: number;
  yaw: number;
  pitch: number;
  eyeHeight: number;
}

export class PoseController {
  state: PoseState = { x: 0, z: -1.5, yaw: 0, pitch: -5, eyeHeight: 1.6 };
  private keys = new Set<string>();
  private dirty = true;

  constructor(private halfW: number, private halfD: number) {}

  keyDown(code: string): void {
    this.keys.add(code);
  }

  keyUp(code: string): void {
    this.keys.delete(code);
  }

  look(dxPx: number, dyPx: number): void {
    this.state.yaw += dxPx * 0.25;
    this.state.pitch = Math.min(85, Math.max(-85, this.state.pitch - dyPx * 0.2));
    this.dirty = true;
  }

  /** Advance movement; returns true when the pose changed. */
  step(dtMs: number): boolean {
    const speed = 1.8 * (dtMs / 1000);
    const fwd = forwardOf(this.state.yaw, 0);
    const right = [fwd[2], 0, -fwd[0]];
    let dx = 0;
    let dz = 0;
    if (this.keys.has("KeyW")) {
      dx += fwd[0] * speed;
      dz += fwd[2] * speed;
    }
    if (this.keys.has("KeyS")) {
      dx -= fwd[0] * speed;
      dz -= fwd[2] * speed;
    }
    if (this.keys.has("KeyD")) {
      dx += right[0] * speed;
      dz += right[2] * speed;
    }
    if (this.keys.has("KeyA")) {
      dx -= right[0] * speed;
      dz -= right[2] * speed;
    }
    if (dx !== 0 || dz !== 0) {
      this.state.x = Math.min(this.halfW, Math.max(-this.halfW, this.state.x + dx));
      this.state.z = Math.min(this.halfD, Math.max(-this.halfD, this.state.z + dz));
      this.dirty = true;
    }
    const changed = this.dirty;
    this.dirty = false;
    return changed;
  }

  poseDoc(): PoseDoc {
    return {
      position: [this.state.x, 0, this.state.z],
      eyeHeight: this.state.eyeHeight,
      yaw: this.state.yaw,
      pitch: this.state.pitch,
    };
  }

  eyePoint(): [number, number, number] {
    return [this.state.x, this.state.eyeHeight, this.state.z];
  }
}
