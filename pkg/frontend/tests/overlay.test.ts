import { describe, expect, it } from "vitest";
import { BG_TINT, FG_TINT, compositeOverlay } from "../src/overlay.js";

function grayImage(width: number, height: number, value: number): Uint8ClampedArray {
  const out = new Uint8ClampedArray(width * height * 4);
  for (let i = 0; i < width * height; i++) {
    out[i * 4] = out[i * 4 + 1] = out[i * 4 + 2] = value;
    out[i * 4 + 3] = 255;
  }
  return out;
}

describe("compositeOverlay", () => {
  it("tints an empty mask uniformly with the background color", () => {
    const img = grayImage(4, 4, 100);
    const out = compositeOverlay(img, new Uint8Array(16), 4, 4, 1.0);
    for (let i = 0; i < 16; i++) {
      expect(out[i * 4]).toBe(BG_TINT[0]);
      expect(out[i * 4 + 1]).toBe(BG_TINT[1]);
      expect(out[i * 4 + 2]).toBe(BG_TINT[2]);
    }
  });

  it("tints a full mask uniformly with the foreground color", () => {
    const img = grayImage(4, 4, 100);
    const out = compositeOverlay(img, new Uint8Array(16).fill(1), 4, 4, 1.0);
    for (let i = 0; i < 16; i++) {
      expect(out[i * 4]).toBe(FG_TINT[0]);
    }
  });

  it("pixel-probes a known square region", () => {
    // 8x8 image, mask covers the 4x4 center square
    const img = grayImage(8, 8, 0);
    const mask = new Uint8Array(64);
    for (let y = 2; y < 6; y++) for (let x = 2; x < 6; x++) mask[y * 8 + x] = 1;
    const out = compositeOverlay(img, mask, 8, 8, 0.5);
    const probe = (x: number, y: number) => out[(y * 8 + x) * 4];
    expect(probe(3, 3)).toBe(Math.round(FG_TINT[0] * 0.5));   // inside
    expect(probe(0, 0)).toBe(Math.round(BG_TINT[0] * 0.5));   // outside
    expect(probe(1, 3)).toBe(Math.round(BG_TINT[0] * 0.5));   // edge-adjacent
    expect(probe(5, 5)).toBe(Math.round(FG_TINT[0] * 0.5));   // inside corner
  });

  it("opacity zero shows the raw image", () => {
    const img = grayImage(2, 2, 77);
    const out = compositeOverlay(img, new Uint8Array(4).fill(1), 2, 2, 0);
    expect(Array.from(out)).toEqual(Array.from(img));
  });

  it("never mutates its inputs", () => {
    const img = grayImage(2, 2, 50);
    const copy = Array.from(img);
    const mask = new Uint8Array([1, 0, 0, 1]);
    compositeOverlay(img, mask, 2, 2, 0.8);
    expect(Array.from(img)).toEqual(copy);
    expect(Array.from(mask)).toEqual([1, 0, 0, 1]);
  });

  it("rejects dimension mismatches without partial output", () => {
    const img = grayImage(4, 4, 10);
    expect(() => compositeOverlay(img, new Uint8Array(9), 4, 4, 1)).toThrow(
      /mask dimensions/,
    );
  });
});
