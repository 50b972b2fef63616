import { describe, expect, it } from "vitest";
import { ApiClient } from "../src/api.js";
import { encodeRle } from "../src/rle.js";
import { SessionFlow } from "../src/session.js";
import type { EnergyEntry, SessionResponse } from "../src/types.js";

const WIDTH = 8;
const HEIGHT = 8;

function stubMask(fill: (x: number, y: number) => boolean): Uint8Array {
  const bits = new Uint8Array(WIDTH * HEIGHT);
  for (let y = 0; y < HEIGHT; y++)
    for (let x = 0; x < WIDTH; x++) bits[y * WIDTH + x] = fill(x, y) ? 1 : 0;
  return bits;
}

function sessionResponse(id: string, bits: Uint8Array): SessionResponse {
  const energy: EnergyEntry[] = [{ data: 10, smoothness: 2, total: 12 }];
  return { v: 1, session_id: id, mask: encodeRle(bits, WIDTH, HEIGHT), energy_log: energy };
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

interface Route {
  match: (url: string, init?: RequestInit) => boolean;
  respond: (url: string, init?: RequestInit) => Response | Promise<Response>;
}

function makeFetch(routes: Route[], log: { url: string; method: string }[]) {
  return async (input: string | URL | Request, init?: RequestInit): Promise<Response> => {
    const url = String(input);
    log.push({ url, method: init?.method ?? "GET" });
    for (const route of routes) {
      if (route.match(url, init)) return route.respond(url, init);
    }
    return jsonResponse(404, { detail: { reason: "unknown session" } });
  };
}

function flowWithRoutes(routes: Route[]) {
  const log: { url: string; method: string }[] = [];
  const events: { masks: Uint8Array[]; phases: string[]; errors: string[] } = {
    masks: [],
    phases: [],
    errors: [],
  };
  const api = new ApiClient("http://stub", makeFetch(routes, log));
  const flow = new SessionFlow(api, {
    onMask: (m) => events.masks.push(m),
    onPhase: (p) => events.phases.push(p),
    onError: (e) => events.errors.push(e),
  });
  return { flow, log, events };
}

const initialMask = stubMask((x, y) => x >= 2 && x < 6 && y >= 2 && y < 6);
const refinedMask = stubMask((x, y) => x >= 3 && x < 6 && y >= 2 && y < 6);

const createRoute: Route = {
  match: (url, init) => url.endsWith("/sessions") && init?.method === "POST",
  respond: () => jsonResponse(200, sessionResponse("s1", initialMask)),
};

describe("SessionFlow", () => {
  it("happy path: upload, box, scribble, download equals stub bytes", async () => {
    const maskBytes = new Uint8Array([137, 80, 78, 71, 1, 2, 3]);
    const { flow, log, events } = flowWithRoutes([
      createRoute,
      {
        match: (url, init) => url.endsWith("/scribbles") && init?.method === "POST",
        respond: () => jsonResponse(200, sessionResponse("s1", refinedMask)),
      },
      {
        match: (url) => url.endsWith("/sessions/s1/mask"),
        respond: () => new Response(maskBytes, { headers: { "content-type": "image/png" } }),
      },
    ]);

    flow.loadImage(new Blob([new Uint8Array([1])]), "img.png");
    expect(flow.currentPhase).toBe("need-bbox");

    await flow.start({ x0: 1, y0: 1, x1: 6, y1: 6 });
    expect(flow.currentPhase).toBe("ready");
    expect(Array.from(events.masks[0])).toEqual(Array.from(initialMask));

    flow.queueStroke({ side: "bg", brush_radius: 2, points: [[2, 3]] });
    await flow.submitStrokes();
    expect(flow.pendingStrokes.length).toBe(0);
    expect(Array.from(events.masks[1])).toEqual(Array.from(refinedMask));

    const blob = await flow.downloadMask();
    expect(new Uint8Array(await blob.arrayBuffer())).toEqual(maskBytes);
    expect(log.filter((l) => l.url.endsWith("/scribbles")).length).toBe(1);
  });

  it("404 on scribbles clears state and prompts restart", async () => {
    const { flow, events } = flowWithRoutes([
      createRoute,
      {
        match: (url) => url.endsWith("/scribbles"),
        respond: () => jsonResponse(404, { detail: { reason: "expired" } }),
      },
    ]);
    flow.loadImage(new Blob([new Uint8Array([1])]), "img.png");
    await flow.start({ x0: 0, y0: 0, x1: 7, y1: 7 });
    flow.queueStroke({ side: "fg", brush_radius: 1, points: [[1, 1]] });
    await flow.submitStrokes();
    expect(flow.currentPhase).toBe("expired");
    expect(flow.id).toBeNull();
    expect(flow.pendingStrokes.length).toBe(0);
    expect(events.errors.some((e) => e.includes("expired"))).toBe(true);
  });

  it("retries a 409 exactly once after the in-flight request settles", async () => {
    let scribbleCalls = 0;
    const { flow, log } = flowWithRoutes([
      createRoute,
      {
        match: (url, init) => url.endsWith("/scribbles") && init?.method === "POST",
        respond: () => {
          scribbleCalls += 1;
          return scribbleCalls === 1
            ? jsonResponse(409, { detail: "busy" })
            : jsonResponse(200, sessionResponse("s1", refinedMask));
        },
      },
      {
        match: (url) => url.endsWith("/sessions/s1"),
        respond: () =>
          jsonResponse(200, { v: 1, session_id: "s1", width: WIDTH, height: HEIGHT }),
      },
    ]);
    flow.loadImage(new Blob([new Uint8Array([1])]), "img.png");
    await flow.start({ x0: 0, y0: 0, x1: 7, y1: 7 });
    flow.queueStroke({ side: "bg", brush_radius: 1, points: [[1, 1]] });
    await flow.submitStrokes();
    expect(scribbleCalls).toBe(2);
    expect(flow.currentPhase).toBe("ready");
    expect(log.filter((l) => l.url.endsWith("/scribbles")).length).toBe(2);
  });

  it("keeps pending strokes when the submit fails", async () => {
    const { flow } = flowWithRoutes([
      createRoute,
      {
        match: (url) => url.endsWith("/scribbles"),
        respond: () => jsonResponse(500, { detail: "engine exploded" }),
      },
    ]);
    flow.loadImage(new Blob([new Uint8Array([1])]), "img.png");
    await flow.start({ x0: 0, y0: 0, x1: 7, y1: 7 });
    flow.queueStroke({ side: "bg", brush_radius: 1, points: [[1, 1]] });
    await flow.submitStrokes();
    expect(flow.pendingStrokes.length).toBe(1);
    expect(flow.currentPhase).toBe("ready");
  });

  it("undo drops the newest pending stroke", () => {
    const { flow } = flowWithRoutes([createRoute]);
    flow.loadImage(new Blob([new Uint8Array([1])]), "img.png");
    flow.queueStroke({ side: "bg", brush_radius: 1, points: [[1, 1]] });
    flow.queueStroke({ side: "fg", brush_radius: 1, points: [[2, 2]] });
    flow.undoPendingStroke();
    expect(flow.pendingStrokes.length).toBe(1);
    expect(flow.pendingStrokes[0].side).toBe("bg");
  });

  it("masks only ever come from server responses", async () => {
    const { flow, events } = flowWithRoutes([createRoute]);
    flow.loadImage(new Blob([new Uint8Array([1])]), "img.png");
    flow.queueStroke({ side: "bg", brush_radius: 9, points: [[0, 0]] });
    // no POST has happened for the stroke: no mask event may exist yet
    expect(events.masks.length).toBe(0);
    await flow.start({ x0: 0, y0: 0, x1: 7, y1: 7 });
    expect(events.masks.length).toBe(1);
    expect(Array.from(events.masks[0])).toEqual(Array.from(initialMask));
  });
});
