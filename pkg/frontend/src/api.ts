import type {
  BBox,
  EngineConfig,
  SessionResponse,
  SessionStatus,
  Stroke,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public reason: string,
  ) {
    super(`HTTP ${status}: ${reason}`);
  }
}

async function raise(resp: Response): Promise<never> {
  let reason = resp.statusText;
  try {
    const body = await resp.json();
    reason = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(resp.status, reason);
}

/** Typed client for the session service. The UI never fabricates mask
 * pixels; every mask comes from one of these calls. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async createSession(
    image: Blob,
    filename: string,
    bbox: BBox,
    config: EngineConfig = {},
  ): Promise<SessionResponse> {
    const form = new FormData();
    form.append("image", image, filename);
    form.append(
      "params",
      JSON.stringify({ bbox: [bbox.x0, bbox.y0, bbox.x1, bbox.y1], config }),
    );
    const resp = await this.fetchFn(`${this.baseUrl}/sessions`, {
      method: "POST",
      body: form,
    });
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  /**
   * Submit scribbles. A 409 (another mutation in flight) is retried once
   * after the server settles; any second conflict propagates.
   */
  async postScribbles(sessionId: string, strokes: Stroke[]): Promise<SessionResponse> {
    const send = async () =>
      this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/scribbles`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ v: 1, strokes }),
      });
    let resp = await send();
    if (resp.status === 409) {
      await this.waitIdle(sessionId);
      resp = await send();
    }
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  private async waitIdle(sessionId: string, timeoutMs = 30000): Promise<void> {
    const start = Date.now();
    while (Date.now() - start < timeoutMs) {
      const resp = await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}`);
      if (resp.ok) return; // a status read implies the store is reachable
      if (resp.status !== 409) return;
      await new Promise((r) => setTimeout(r, 250));
    }
  }

  async getStatus(sessionId: string): Promise<SessionStatus> {
    const resp = await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}`);
    if (!resp.ok) await raise(resp);
    return resp.json();
  }

  async downloadMaskPng(sessionId: string): Promise<Blob> {
    const resp = await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}/mask`);
    if (!resp.ok) await raise(resp);
    return resp.blob();
  }

  async deleteSession(sessionId: string): Promise<void> {
    const resp = await this.fetchFn(`${this.baseUrl}/sessions/${sessionId}`, {
      method: "DELETE",
    });
    if (!resp.ok && resp.status !== 404) await raise(resp);
  }
}
