import { ApiClient, ApiError } from "./api.js";
import { decodeRle } from "./rle.js";
import type {
  BBox,
  EnergyEntry,
  EngineConfig,
  SessionResponse,
  Stroke,
} from "./types.js";

export type FlowPhase =
  | "empty" // nothing loaded
  | "need-bbox" // image loaded, waiting for the box
  | "segmenting" // request in flight
  | "ready" // mask on screen, accepting scribbles
  | "expired"; // server forgot us; restart required

export interface FlowEvents {
  onPhase?(phase: FlowPhase): void;
  /** Every mask shown in the UI passes through here, server-acknowledged. */
  onMask?(mask: Uint8Array, width: number, height: number): void;
  onEnergy?(log: EnergyEntry[]): void;
  onError?(message: string): void;
}

/**
 * Drives one interactive session: upload + box -> initial mask ->
 * scribble rounds -> download. Exactly one mutation is in flight at a
 * time; strokes drawn while the server is busy queue up as pending and
 * are cleared only after a successful POST.
 */
export class SessionFlow {
  private sessionId: string | null = null;
  private phase: FlowPhase = "empty";
  private image: { blob: Blob; filename: string } | null = null;
  private maskSize: { width: number; height: number } | null = null;
  private pending: Stroke[] = [];
  private inFlight = false;
  readonly energyRounds: EnergyEntry[][] = [];

  constructor(
    private readonly api: ApiClient,
    private readonly events: FlowEvents = {},
    private readonly config: EngineConfig = {},
  ) {}

  get currentPhase(): FlowPhase {
    return this.phase;
  }

  get id(): string | null {
    return this.sessionId;
  }

  get pendingStrokes(): readonly Stroke[] {
    return this.pending;
  }

  loadImage(blob: Blob, filename: string): void {
    this.image = { blob, filename };
    this.sessionId = null;
    this.pending = [];
    this.energyRounds.length = 0;
    this.setPhase("need-bbox");
  }

  private setPhase(phase: FlowPhase): void {
    this.phase = phase;
    this.events.onPhase?.(phase);
  }

  private acceptResponse(resp: SessionResponse): void {
    this.sessionId = resp.session_id;
    this.maskSize = { width: resp.mask.width, height: resp.mask.height };
    this.energyRounds.push(resp.energy_log);
    this.events.onEnergy?.(resp.energy_log);
    this.events.onMask?.(decodeRle(resp.mask), resp.mask.width, resp.mask.height);
    this.setPhase("ready");
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError && err.status === 404) {
      // session expired server-side: local state is stale, prompt restart
      this.sessionId = null;
      this.pending = [];
      this.setPhase("expired");
      this.events.onError?.("session expired on the server; draw a box to restart");
      return;
    }
    this.setPhase(this.sessionId ? "ready" : "need-bbox");
    this.events.onError?.(err instanceof Error ? err.message : String(err));
  }

  /** Create the session from the drawn box and show the initial mask. */
  async start(bbox: BBox): Promise<void> {
    if (!this.image) throw new Error("no image loaded");
    if (this.inFlight) return;
    this.inFlight = true;
    this.setPhase("segmenting");
    try {
      const resp = await this.api.createSession(
        this.image.blob,
        this.image.filename,
        bbox,
        this.config,
      );
      this.acceptResponse(resp);
    } catch (err) {
      this.fail(err);
    } finally {
      this.inFlight = false;
    }
  }

  queueStroke(stroke: Stroke): void {
    this.pending.push(stroke);
  }

  undoPendingStroke(): void {
    this.pending.pop();
  }

  /** Submit the pending strokes; they clear only on success. */
  async submitStrokes(): Promise<void> {
    if (!this.sessionId || this.pending.length === 0 || this.inFlight) return;
    this.inFlight = true;
    this.setPhase("segmenting");
    const batch = this.pending.slice();
    try {
      const resp = await this.api.postScribbles(this.sessionId, batch);
      this.pending = this.pending.slice(batch.length);
      this.acceptResponse(resp);
    } catch (err) {
      this.fail(err);
    } finally {
      this.inFlight = false;
    }
  }

  async downloadMask(): Promise<Blob> {
    if (!this.sessionId) throw new Error("no active session");
    return this.api.downloadMaskPng(this.sessionId);
  }

  get size(): { width: number; height: number } | null {
    return this.maskSize;
  }
}
