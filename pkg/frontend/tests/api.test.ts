import { describe, expect, it } from "vitest";
import { SessionClient } from "../src/api.js";

function mockFetch(routes: Record<string, unknown>) {
  const calls: { url: string; body?: unknown }[] = [];
  const fn = (async (url: string, init?: RequestInit) => {
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ url, body });
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const hit = Object.entries(routes).find(([route]) => path.startsWith(route));
    if (!hit) return new Response("not found", { status: 404 });
    return new Response(JSON.stringify(hit[1]), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  }) as unknown as typeof fetch;
  return { fn, calls };
}

describe("SessionClient", () => {
  it("creates a session and remembers its id", async () => {
    const { fn, calls } = mockFetch({
      "/sessions": { sessionId: "s1", state: { objects: [], triggers: [], step: 0 } },
    });
    const client = new SessionClient("http://svc", fn);
    await client.createSession();
    expect(client.sessionId).toBe("s1");
    expect(calls[0].url).toBe("http://svc/sessions");
  });

  it("submits prompts with token timestamps and gestures", async () => {
    const { fn, calls } = mockFetch({
      "/sessions/s1/prompt": { index: 0, status: "pending", prompt: "x", stages: {} },
      "/sessions": { sessionId: "s1", state: { objects: [], triggers: [], step: 0 } },
    });
    const client = new SessionClient("http://svc", fn);
    await client.createSession();
    await client.submitPrompt({
      text: "put a desk here",
      tokenTimestamps: [0, 120, 300, 450],
      gestures: [{ t: 460, origin: [0, 1.6, 0], direction: [0, -1, 1] }],
    });
    const body = calls[1].body as any;
    expect(body.text).toBe("put a desk here");
    expect(body.tokenTimestamps).toHaveLength(4);
    expect(body.gestures[0].t).toBe(460);
  });

  it("raises on service errors with the status and detail", async () => {
    const fn = (async () => new Response("boom", { status: 409 })) as unknown as typeof fetch;
    const client = new SessionClient("http://svc", fn);
    client.sessionId = "s1";
    await expect(client.confirm(0)).rejects.toThrow(/409/);
  });

  it("sends grab state only when provided", async () => {
    const { fn, calls } = mockFetch({ "/sessions/s1/pose": { ok: true } });
    const client = new SessionClient("http://svc", fn);
    client.sessionId = "s1";
    await client.updatePose({ position: [0, 0, 0], eyeHeight: 1.6, yaw: 0, pitch: 0 });
    await client.updatePose({ position: [0, 0, 0], eyeHeight: 1.6, yaw: 0, pitch: 0 }, "lamp-1");
    expect((calls[0].body as any).grab).toBeUndefined();
    expect((calls[1].body as any).grab).toBe("lamp-1");
  });
});
