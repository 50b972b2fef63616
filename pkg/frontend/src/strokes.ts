import { ViewTransform } from "./transform.js";
import type { BBox, Stroke, Tool } from "./types.js";

/** A pointer sample in canvas coordinates (extracted from PointerEvents
 * by the DOM layer; kept plain so the logic is testable headless). */
export interface PointerSample {
  x: number;
  y: number;
}

export type CaptureResult =
  | { kind: "stroke"; stroke: Stroke }
  | { kind: "bbox"; bbox: BBox }
  | null;

/**
 * Turns pointer down/move/up sequences into image-coordinate strokes (for
 * the brushes) or a bounding box (for the box tool). Points landing
 * outside the image are clipped into bounds rather than dropped, so a drag
 * that leaves the canvas still paints up to the edge.
 */
export class StrokeCapture {
  private down = false;
  private points: [number, number][] = [];

  constructor(
    private readonly imageWidth: number,
    private readonly imageHeight: number,
    public view: ViewTransform,
  ) {}

  private toImage(sample: PointerSample): [number, number] {
    const p = this.view.canvasToImage(sample.x, sample.y);
    return [
      Math.min(this.imageWidth - 1, Math.max(0, p.x)),
      Math.min(this.imageHeight - 1, Math.max(0, p.y)),
    ];
  }

  pointerDown(sample: PointerSample): void {
    this.down = true;
    this.points = [this.toImage(sample)];
  }

  pointerMove(sample: PointerSample): void {
    if (!this.down) return;
    this.points.push(this.toImage(sample));
  }

  /** Finish the gesture; a click without drag yields a single-point stroke. */
  pointerUp(sample: PointerSample, tool: Tool, brushRadius: number): CaptureResult {
    if (!this.down) return null;
    this.pointerMove({ ...sample });
    this.down = false;
    const pts = this.points;
    this.points = [];
    if (tool === "bbox") {
      const first = pts[0];
      const last = pts[pts.length - 1];
      return {
        kind: "bbox",
        bbox: {
          x0: Math.floor(Math.min(first[0], last[0])),
          y0: Math.floor(Math.min(first[1], last[1])),
          x1: Math.floor(Math.max(first[0], last[0])),
          y1: Math.floor(Math.max(first[1], last[1])),
        },
      };
    }
    return {
      kind: "stroke",
      stroke: {
        side: tool === "fg-brush" ? "fg" : "bg",
        brush_radius: brushRadius,
        points: dedupe(pts),
      },
    };
  }

  get active(): boolean {
    return this.down;
  }
}

function dedupe(points: [number, number][]): [number, number][] {
  const out: [number, number][] = [];
  for (const p of points) {
    const last = out[out.length - 1];
    if (!last || Math.abs(last[0] - p[0]) > 1e-9 || Math.abs(last[1] - p[1]) > 1e-9) {
      out.push(p);
    }
  }
  return out;
}
