/** App wiring: service session, stream folding, viewport, prompt console. */

import { SessionClient } from "./api.js";
import { PromptRecorder, rayFloorPoint, screenRay } from "./gesture.js";
import { FeedbackPanel } from "./panel.js";
import { PoseController } from "./poseControl.js";
import { Viewport } from "./render.js";
import { SceneStore } from "./store.js";
import type { FeedEvent, TurnDoc } from "./types.js";

const SERVICE_URL = (window as any).ROOMSCRIPT_SERVICE ?? "http://127.0.0.1:8700";

function el<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

async function boot(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("viewport");
  const promptBox = el<HTMLTextAreaElement>("prompt");
  const statusLine = el<HTMLDivElement>("status");
  const tickerBox = el<HTMLUListElement>("ticker");

  const client = new SessionClient(SERVICE_URL);
  const state = await client.createSession();
  const store = new SceneStore();
  store.reset(state);

  const viewport = new Viewport(canvas, state.room);
  const pose = new PoseController(state.room.width / 2 - 0.1, state.room.depth / 2 - 0.1);
  const recorder = new PromptRecorder();
  const panel = new FeedbackPanel();
  let pendingTurn: TurnDoc | null = null;

  store.onChange(() => {
    viewport.sync(store);
    tickerBox.innerHTML = "";
    for (const entry of store.ticker.slice(-8).reverse()) {
      const li = document.createElement("li");
      li.textContent = entry.text;
      tickerBox.appendChild(li);
    }
  });
  viewport.sync(store);

  panel.onChange((view) => {
    el("stage-transcription").textContent = view.transcription || "-";
    el("stage-plan").textContent = view.planText || view.message || "-";
    el("stage-message").textContent = view.message;
    const list = el<HTMLUListElement>("stage-explanations");
    list.innerHTML = "";
    for (const text of view.explanations) {
      const li = document.createElement("li");
      li.textContent = text;
      list.appendChild(li);
    }
    el<HTMLButtonElement>("confirm").disabled = !view.confirmEnabled;
    el<HTMLButtonElement>("abort").disabled = !view.abortEnabled;
    el("turn-status").textContent = view.status;
    viewport.highlight(view.confirmEnabled ? view.highlightNames : []);
  });

  client.openStream((event: FeedEvent) => {
    store.apply(event);
    if (event.type === "turn") {
      panel.turnResolved(event.turn, event.status);
      if (pendingTurn && pendingTurn.index === event.turn && event.status !== "pending") {
        pendingTurn = null;
      }
    }
  });

  // -- pose loop ------------------------------------------------------------
  let lastFrame = performance.now();
  let lastPosePush = 0;
  const frame = (now: number) => {
    if (pose.step(now - lastFrame) && now - lastPosePush > 80) {
      lastPosePush = now;
      void client.updatePose(pose.poseDoc());
    }
    const eye = pose.eyePoint();
    viewport.camera.position.set(eye[0], eye[1], eye[2]);
    const fwd = screenRay(cameraPose(), 0, 0).direction;
    viewport.camera.lookAt(eye[0] + fwd[0], eye[1] + fwd[1], eye[2] + fwd[2]);
    viewport.frame(now);
    lastFrame = now;
    requestAnimationFrame(frame);
  };
  requestAnimationFrame(frame);

  const cameraPose = () => ({
    position: pose.eyePoint(),
    yaw: pose.state.yaw,
    pitch: pose.state.pitch,
    fovDeg: 60,
    aspect: canvas.clientWidth / Math.max(1, canvas.clientHeight),
  });

  canvas.addEventListener("click", (event) => {
    if (document.pointerLockElement !== canvas && event.shiftKey === false) {
      // plain click: capture a pointing gesture through the cursor
      const rect = canvas.getBoundingClientRect();
      const ndcX = ((event.clientX - rect.left) / rect.width) * 2 - 1;
      const ndcY = -(((event.clientY - rect.top) / rect.height) * 2 - 1);
      const ray = screenRay(cameraPose(), ndcX, ndcY);
      const hit = viewport.pick(ndcX, ndcY);
      const floor = rayFloorPoint(ray.origin, ray.direction);
      const halfW = state.room.width / 2;
      const halfD = state.room.depth / 2;
      const inRoom =
        floor !== null && Math.abs(floor[0]) <= halfW && Math.abs(floor[2]) <= halfD;
      if (!hit && !inRoom) {
        statusLine.textContent = "that points outside the room - no gesture captured";
        return;
      }
      recorder.pointAt(ray.origin, ray.direction);
      statusLine.textContent = hit
        ? `pointing at ${hit} (${recorder.gestureCount()} gesture(s) recorded)`
        : `pointing at the floor (${recorder.gestureCount()} gesture(s) recorded)`;
    } else {
      canvas.requestPointerLock();
    }
  });

  document.addEventListener("mousemove", (event) => {
    if (document.pointerLockElement === canvas) pose.look(event.movementX, event.movementY);
  });
  document.addEventListener("keydown", (event) => {
    if (document.activeElement !== promptBox) pose.keyDown(event.code);
  });
  document.addEventListener("keyup", (event) => pose.keyUp(event.code));

  promptBox.addEventListener("input", () => recorder.textChanged(promptBox.value));

  el<HTMLButtonElement>("send").addEventListener("click", async () => {
    const payload = recorder.finish(promptBox.value.trim());
    if (!payload.text) return;
    promptBox.value = "";
    statusLine.textContent = "staging...";
    try {
      const turn = await client.submitPrompt(payload);
      pendingTurn = turn.status === "pending" ? turn : null;
      panel.showTurn(turn, store.doc.objects.map((o) => o.name));
      statusLine.textContent =
        turn.status === "pending" ? "review the plan, then confirm or abort" : turn.status;
    } catch (err) {
      statusLine.textContent = String(err);
    }
  });

  el<HTMLButtonElement>("confirm").addEventListener("click", async () => {
    if (!pendingTurn) return;
    const turn = await client.confirm(pendingTurn.index);
    panel.showTurn(turn, store.doc.objects.map((o) => o.name));
  });

  el<HTMLButtonElement>("abort").addEventListener("click", async () => {
    if (!pendingTurn) return;
    const turn = await client.abort(pendingTurn.index);
    panel.showTurn(turn, store.doc.objects.map((o) => o.name));
  });

  el<HTMLButtonElement>("tick").addEventListener("click", () => void client.runTicks(20));

  window.addEventListener("resize", () => viewport.resize());
}

void boot();
