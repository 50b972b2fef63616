import { describe, expect, it } from "vitest";
import { ViewTransform } from "../src/transform.js";

describe("ViewTransform", () => {
  it("round-trips within 0.5 px at every supported zoom", () => {
    for (const zoom of [0.5, 1, 2, 4]) {
      const view = new ViewTransform(zoom, 13.7, -4.2);
      for (let i = 0; i < 500; i++) {
        const ix = (i * 7919) % 512;
        const iy = (i * 104729) % 512;
        const c = view.imageToCanvas(ix, iy);
        const back = view.canvasToImage(c.x, c.y);
        expect(Math.abs(back.x - ix)).toBeLessThanOrEqual(0.5);
        expect(Math.abs(back.y - iy)).toBeLessThanOrEqual(0.5);
      }
    }
  });

  it("maps canvas deltas to image deltas divided by zoom", () => {
    const view = new ViewTransform(2, 0, 0);
    const a = view.canvasToImage(10, 10);
    const b = view.canvasToImage(30, 10);
    expect(b.x - a.x).toBeCloseTo(10, 12);
  });

  it("clamps pixel lookups to the image", () => {
    const view = new ViewTransform(1, 0, 0);
    expect(view.canvasToPixel(-5, 3, 8, 8)).toEqual({ x: 0, y: 3 });
    expect(view.canvasToPixel(100, 100, 8, 8)).toEqual({ x: 7, y: 7 });
  });

  it("zoomAt keeps the anchor point fixed", () => {
    const view = new ViewTransform(1, 5, 9);
    const anchor = { x: 120, y: 80 };
    const before = view.canvasToImage(anchor.x, anchor.y);
    view.zoomAt(2, anchor.x, anchor.y);
    const after = view.canvasToImage(anchor.x, anchor.y);
    expect(after.x).toBeCloseTo(before.x, 9);
    expect(after.y).toBeCloseTo(before.y, 9);
    expect(view.zoom).toBe(2);
  });
});
