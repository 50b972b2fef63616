import { ApiClient } from "./api.js";
import { compositeOverlay } from "./overlay.js";
import { SessionFlow } from "./session.js";
import { drawSparkline } from "./sparkline.js";
import { StrokeCapture } from "./strokes.js";
import { ViewTransform } from "./transform.js";
import type { Tool } from "./types.js";

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

const canvas = $<HTMLCanvasElement>("view");
const ctx = canvas.getContext("2d")!;
const sparkCanvas = $<HTMLCanvasElement>("sparkline");
const sparkCtx = sparkCanvas.getContext("2d")!;
const banner = $<HTMLDivElement>("banner");
const phaseLabel = $<HTMLSpanElement>("phase");

let tool: Tool = "bbox";
let brushRadius = 3;
let overlayOn = true;
let opacity = 0.45;
let imageData: ImageData | null = null;
let mask: Uint8Array | null = null;
let capture: StrokeCapture | null = null;
const view = new ViewTransform();

const base = (window as { MIST_BASE_URL?: string }).MIST_BASE_URL ?? "";
const api = new ApiClient(base);
const flow = new SessionFlow(api, {
  onPhase: (p) => {
    phaseLabel.textContent = p;
    canvas.style.cursor = p === "segmenting" ? "progress" : "crosshair";
  },
  onMask: (bits) => {
    mask = bits;
    render();
  },
  onEnergy: (log) => drawSparkline(sparkCtx, log, sparkCanvas.width, sparkCanvas.height),
  onError: (message) => {
    banner.textContent = message;
    banner.hidden = false;
    setTimeout(() => (banner.hidden = true), 6000);
  },
});

function render(pendingBoxEnd?: { x: number; y: number }) {
  if (!imageData) return;
  let shown: Uint8ClampedArray<ArrayBuffer>;
  if (mask && overlayOn) {
    shown = compositeOverlay(imageData.data, mask, imageData.width, imageData.height, opacity);
  } else {
    shown = new Uint8ClampedArray(imageData.data.length);
    shown.set(imageData.data);
  }
  const frame = new ImageData(shown, imageData.width, imageData.height);
  ctx.save();
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  // draw at 1:1 into an offscreen, then blit through the transform
  const off = new OffscreenCanvas(imageData.width, imageData.height);
  off.getContext("2d")!.putImageData(frame, 0, 0);
  ctx.setTransform(view.zoom, 0, 0, view.zoom, view.panX, view.panY);
  ctx.drawImage(off, 0, 0);
  ctx.restore();
  if (pendingBoxEnd && boxStart) {
    ctx.strokeStyle = "#ffd34d";
    ctx.lineWidth = 1.5;
    ctx.strokeRect(
      boxStart.x,
      boxStart.y,
      pendingBoxEnd.x - boxStart.x,
      pendingBoxEnd.y - boxStart.y,
    );
  }
}

let boxStart: { x: number; y: number } | null = null;

function canvasPos(ev: PointerEvent) {
  const r = canvas.getBoundingClientRect();
  return { x: ev.clientX - r.left, y: ev.clientY - r.top };
}

canvas.addEventListener("pointerdown", (ev) => {
  if (!capture) return;
  const pos = canvasPos(ev);
  capture.pointerDown(pos);
  if (tool === "bbox") boxStart = pos;
  canvas.setPointerCapture(ev.pointerId);
});

canvas.addEventListener("pointermove", (ev) => {
  if (!capture?.active) return;
  const pos = canvasPos(ev);
  capture.pointerMove(pos);
  if (tool === "bbox") render(pos);
});

canvas.addEventListener("pointerup", async (ev) => {
  if (!capture) return;
  const result = capture.pointerUp(canvasPos(ev), tool, brushRadius);
  boxStart = null;
  if (!result) return;
  if (result.kind === "bbox") {
    await flow.start(result.bbox);
  } else {
    flow.queueStroke(result.stroke);
    await flow.submitStrokes();
  }
});

canvas.addEventListener("wheel", (ev) => {
  ev.preventDefault();
  const pos = { x: ev.offsetX, y: ev.offsetY };
  view.zoomAt(ev.deltaY < 0 ? 1.25 : 0.8, pos.x, pos.y);
  render();
});

$<HTMLInputElement>("file").addEventListener("change", async (ev) => {
  const file = (ev.target as HTMLInputElement).files?.[0];
  if (!file) return;
  const bitmap = await createImageBitmap(file);
  const off = new OffscreenCanvas(bitmap.width, bitmap.height);
  const octx = off.getContext("2d")!;
  octx.drawImage(bitmap, 0, 0);
  imageData = octx.getImageData(0, 0, bitmap.width, bitmap.height);
  mask = null;
  capture = new StrokeCapture(bitmap.width, bitmap.height, view);
  canvas.width = Math.max(bitmap.width, 512);
  canvas.height = Math.max(bitmap.height, 512);
  view.zoom = 1;
  view.panX = view.panY = 0;
  flow.loadImage(file, file.name);
  render();
});

for (const [id, value] of [["tool-bbox", "bbox"], ["tool-fg", "fg-brush"],
                           ["tool-bg", "bg-brush"]] as [string, Tool][]) {
  $<HTMLButtonElement>(id).addEventListener("click", () => {
    tool = value;
    document.querySelectorAll(".tool").forEach((b) => b.classList.remove("active"));
    $(id).classList.add("active");
  });
}

$<HTMLInputElement>("brush-radius").addEventListener("input", (ev) => {
  brushRadius = Number((ev.target as HTMLInputElement).value);
});

$<HTMLInputElement>("opacity").addEventListener("input", (ev) => {
  opacity = Number((ev.target as HTMLInputElement).value) / 100;
  render();
});

$<HTMLInputElement>("overlay-toggle").addEventListener("change", (ev) => {
  overlayOn = (ev.target as HTMLInputElement).checked;
  render();
});

$<HTMLButtonElement>("undo").addEventListener("click", () => {
  flow.undoPendingStroke();
});

$<HTMLButtonElement>("download").addEventListener("click", async () => {
  try {
    const blob = await flow.downloadMask();
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = "mask.png";
    a.click();
    URL.revokeObjectURL(url);
  } catch (err) {
    banner.textContent = err instanceof Error ? err.message : String(err);
    banner.hidden = false;
  }
});
