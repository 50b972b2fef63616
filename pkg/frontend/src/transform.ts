/** Canvas/image coordinate mapping under zoom and pan.
 *
 * Image pixel (ix, iy) renders as the square of side `zoom` whose top-left
 * canvas corner is (ix * zoom + panX, iy * zoom + panY). The inverse must
 * round-trip within 0.5 px at every supported zoom level.
 */
export class ViewTransform {
  constructor(
    public zoom = 1,
    public panX = 0,
    public panY = 0,
  ) {}

  imageToCanvas(ix: number, iy: number): { x: number; y: number } {
    return { x: ix * this.zoom + this.panX, y: iy * this.zoom + this.panY };
  }

  canvasToImage(cx: number, cy: number): { x: number; y: number } {
    return { x: (cx - this.panX) / this.zoom, y: (cy - this.panY) / this.zoom };
  }

  /** Canvas pixel -> integer image pixel, clamped to the image bounds. */
  canvasToPixel(cx: number, cy: number, width: number, height: number) {
    const p = this.canvasToImage(cx, cy);
    return {
      x: Math.min(width - 1, Math.max(0, Math.floor(p.x))),
      y: Math.min(height - 1, Math.max(0, Math.floor(p.y))),
    };
  }

  zoomAt(factor: number, cx: number, cy: number): void {
    // keep the canvas point (cx, cy) anchored while zooming
    const before = this.canvasToImage(cx, cy);
    this.zoom *= factor;
    const after = this.imageToCanvas(before.x, before.y);
    this.panX += cx - after.x;
    this.panY += cy - after.y;
  }
}
