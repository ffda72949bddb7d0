/** HTTP + websocket client for the session service. */

import type {
  FeedEvent,
  GestureSampleDoc,
  PoseDoc,
  SceneDoc,
  TurnDoc,
} from "./types.js";

export class SessionClient {
  sessionId: string | null = null;

  constructor(
    private baseUrl: string,
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      const detail = await resp.text();
      throw new Error(`POST ${path} failed (${resp.status}): ${detail.slice(0, 200)}`);
    }
    return resp.json() as Promise<T>;
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    if (!resp.ok) throw new Error(`GET ${path} failed (${resp.status})`);
    return resp.json() as Promise<T>;
  }

  async createSession(): Promise<SceneDoc> {
    const doc = await this.post<{ sessionId: string; state: SceneDoc }>("/sessions", {});
    this.sessionId = doc.sessionId;
    return doc.state;
  }

  async state(): Promise<SceneDoc> {
    return this.get(`/sessions/${this.sessionId}/state`);
  }

  async submitPrompt(payload: {
    text: string;
    tokenTimestamps: number[];
    gestures: GestureSampleDoc[];
  }): Promise<TurnDoc> {
    return this.post(`/sessions/${this.sessionId}/prompt`, payload);
  }

  async confirm(turnIndex: number): Promise<TurnDoc> {
    return this.post(`/sessions/${this.sessionId}/confirm`, { turnIndex });
  }

  async abort(turnIndex: number): Promise<TurnDoc> {
    return this.post(`/sessions/${this.sessionId}/abort`, { turnIndex });
  }

  async updatePose(pose: PoseDoc, grab?: string | null): Promise<void> {
    const body: Record<string, unknown> = { pose };
    if (grab !== undefined) body.grab = grab;
    await this.post(`/sessions/${this.sessionId}/pose`, body);
  }

  async runTicks(n: number): Promise<void> {
    await this.post(`/sessions/${this.sessionId}/ticks`, { n });
  }

  /** Open the event stream; events arrive in order, each exactly once. */
  openStream(onEvent: (event: FeedEvent) => void): WebSocket {
    const wsUrl = this.baseUrl.replace(/^http/, "ws") + `/sessions/${this.sessionId}/stream`;
    const ws = new WebSocket(wsUrl);
    ws.onmessage = (msg) => onEvent(JSON.parse(msg.data as string) as FeedEvent);
    return ws;
  }
}
