import type { EnergyEntry } from "./types.js";

/** Normalized polyline (x, y in [0, 1], y grows downward) for an energy
 * trace; pure so it can be tested without a canvas. */
export function sparklinePoints(log: EnergyEntry[]): [number, number][] {
  if (log.length === 0) return [];
  const totals = log.map((e) => e.total);
  const lo = Math.min(...totals);
  const hi = Math.max(...totals);
  const span = hi - lo || 1;
  return totals.map((t, i) => [
    log.length === 1 ? 0.5 : i / (log.length - 1),
    1 - (t - lo) / span,
  ]);
}

export function drawSparkline(
  ctx: CanvasRenderingContext2D,
  log: EnergyEntry[],
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  const pts = sparklinePoints(log);
  if (pts.length === 0) return;
  ctx.strokeStyle = "#4a9eff";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  const pad = 3;
  pts.forEach(([x, y], i) => {
    const cx = pad + x * (width - 2 * pad);
    const cy = pad + y * (height - 2 * pad);
    if (i === 0) ctx.moveTo(cx, cy);
    else ctx.lineTo(cx, cy);
  });
  ctx.stroke();
}
