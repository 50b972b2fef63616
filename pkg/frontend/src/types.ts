/** Wire types for the segmentation session API (schema v1). */

export interface RleMask {
  v: number;
  width: number;
  height: number;
  /** Row-major [value, count] pairs. */
  rle: [number, number][];
}

export interface EnergyEntry {
  data: number;
  smoothness: number;
  total: number;
}

export interface SessionResponse {
  v: number;
  session_id: string;
  mask: RleMask;
  energy_log: EnergyEntry[];
}

export interface SessionStatus {
  v: number;
  session_id: string;
  width: number;
  height: number;
  bbox: [number, number, number, number];
  iterated: boolean;
  energy_log: EnergyEntry[];
}

export type StrokeSide = "fg" | "bg";

export interface Stroke {
  side: StrokeSide;
  brush_radius: number;
  /** Image-coordinate polyline. */
  points: [number, number][];
}

export interface BBox {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export interface EngineConfig {
  k_iterations?: number;
  gamma?: number;
  gmm_components?: number;
  marker_radius?: number;
  min_component?: number;
  seed?: number;
  marker_soft?: boolean;
}

export type Tool = "bbox" | "fg-brush" | "bg-brush";
