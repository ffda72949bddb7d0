/**
 * three.js viewport. Meshes are parametrized boxes per object kind; state
 * changes arrive as folded deltas and are tweened over 300 ms purely
 * cosmetically - the engine state itself is instantaneous.
 */

import * as THREE from "three";
import type { ObjectDoc, SceneDoc } from "./types.js";
import type { SceneStore } from "./store.js";

const TWEEN_MS = 300;

interface Tracked {
  mesh: THREE.Mesh;
  from: THREE.Vector3;
  to: THREE.Vector3;
  tweenStart: number;
}

function targetPosition(od: ObjectDoc): THREE.Vector3 {
  // engine anchors are bottom-center (wall objects: back-face center); the
  // mesh origin is its center
  const { h, d } = od.size;
  if (od.wallMounted === "north") return new THREE.Vector3(od.position.x, od.position.y, od.position.z - d / 2);
  if (od.wallMounted === "south") return new THREE.Vector3(od.position.x, od.position.y, od.position.z + d / 2);
  if (od.wallMounted === "east") return new THREE.Vector3(od.position.x - d / 2, od.position.y, od.position.z);
  if (od.wallMounted === "west") return new THREE.Vector3(od.position.x + d / 2, od.position.y, od.position.z);
  return new THREE.Vector3(od.position.x, od.position.y + h / 2, od.position.z);
}

function geometryFor(od: ObjectDoc): THREE.BufferGeometry {
  if (od.kind === "sphere") {
    return new THREE.SphereGeometry(Math.min(od.size.w, od.size.h, od.size.d) / 2, 20, 14);
  }
  if (od.kind === "pyramid") {
    return new THREE.ConeGeometry(od.size.w / 2, od.size.h, 4);
  }
  return new THREE.BoxGeometry(od.size.w, od.size.h, od.size.d);
}

export class Viewport {
  readonly scene = new THREE.Scene();
  readonly camera: THREE.PerspectiveCamera;
  readonly renderer: THREE.WebGLRenderer;
  private tracked = new Map<string, Tracked>();
  private sizes = new Map<string, string>();
  private highlighted = new Set<string>();
  private raycaster = new THREE.Raycaster();

  constructor(private canvas: HTMLCanvasElement, room: SceneDoc["room"]) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.camera = new THREE.PerspectiveCamera(60, 1, 0.05, 60);
    this.scene.background = new THREE.Color(0x14161c);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.7));
    const sun = new THREE.DirectionalLight(0xffffff, 1.1);
    sun.position.set(2, 5, 1);
    this.scene.add(sun);
    this.buildRoomShell(room);
    this.resize();
  }

  private buildRoomShell(room: SceneDoc["room"]): void {
    const floor = new THREE.Mesh(
      new THREE.PlaneGeometry(room.width, room.depth),
      new THREE.MeshStandardMaterial({ color: 0x2a2e38 }),
    );
    floor.rotation.x = -Math.PI / 2;
    floor.name = "__floor__";
    this.scene.add(floor);
    this.scene.add(new THREE.GridHelper(room.width, 8, 0x3f4552, 0x3f4552));
    const walls = new THREE.LineSegments(
      new THREE.EdgesGeometry(new THREE.BoxGeometry(room.width, room.height, room.depth)),
      new THREE.LineBasicMaterial({ color: 0x566074 }),
    );
    walls.position.y = room.height / 2;
    this.scene.add(walls);
  }

  resize(): void {
    const width = this.canvas.clientWidth || 800;
    const height = this.canvas.clientHeight || 600;
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / height;
    this.camera.updateProjectionMatrix();
  }

  /** Reconcile meshes with the store document. */
  sync(store: SceneStore): void {
    const seen = new Set<string>();
    for (const od of store.doc.objects) {
      seen.add(od.name);
      const sizeKey = `${od.kind}:${od.size.w}x${od.size.h}x${od.size.d}`;
      let entry = this.tracked.get(od.name);
      if (entry && this.sizes.get(od.name) !== sizeKey) {
        this.scene.remove(entry.mesh);
        entry.mesh.geometry.dispose();
        entry = undefined;
      }
      if (!entry) {
        const mesh = new THREE.Mesh(
          geometryFor(od),
          new THREE.MeshStandardMaterial({ color: 0xffffff }),
        );
        mesh.name = od.name;
        mesh.position.copy(targetPosition(od));
        this.scene.add(mesh);
        entry = { mesh, from: mesh.position.clone(), to: mesh.position.clone(), tweenStart: 0 };
        this.tracked.set(od.name, entry);
        this.sizes.set(od.name, sizeKey);
      }
      const target = targetPosition(od);
      if (!entry.to.equals(target)) {
        entry.from = entry.mesh.position.clone();
        entry.to = target;
        entry.tweenStart = performance.now();
      }
      entry.mesh.rotation.y = (od.rotation.yaw * Math.PI) / 180;
      const material = entry.mesh.material as THREE.MeshStandardMaterial;
      material.color.setRGB(od.color.r, od.color.g, od.color.b);
      if (od.illuminated) {
        material.emissive.setRGB(od.color.r, od.color.g, od.color.b);
        material.emissiveIntensity = od.luminousIntensity / 10;
      } else if (this.highlighted.has(od.name)) {
        material.emissive.setRGB(0.3, 0.6, 1.0);
        material.emissiveIntensity = 0.6;
      } else {
        material.emissive.setRGB(0, 0, 0);
        material.emissiveIntensity = 0;
      }
    }
    for (const [name, entry] of this.tracked) {
      if (!seen.has(name)) {
        this.scene.remove(entry.mesh);
        entry.mesh.geometry.dispose();
        this.tracked.delete(name);
        this.sizes.delete(name);
      }
    }
  }

  /** Highlight the objects a staged plan references. */
  highlight(names: string[]): void {
    this.highlighted = new Set(names);
  }

  /** The object name under a viewport point, if any. */
  pick(ndcX: number, ndcY: number): string | null {
    this.raycaster.setFromCamera(new THREE.Vector2(ndcX, ndcY), this.camera);
    const meshes = [...this.tracked.values()].map((t) => t.mesh);
    const hits = this.raycaster.intersectObjects(meshes, false);
    return hits.length > 0 ? hits[0].object.name : null;
  }

  frame(now: number): void {
    for (const entry of this.tracked.values()) {
      const t = Math.min(1, (now - entry.tweenStart) / TWEEN_MS);
      entry.mesh.position.lerpVectors(entry.from, entry.to, t);
    }
    this.renderer.render(this.scene, this.camera);
  }
}
