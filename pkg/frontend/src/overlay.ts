/** Mask overlay rendering: foreground tinted pink, background green. */

export const FG_TINT: [number, number, number] = [236, 64, 160];
export const BG_TINT: [number, number, number] = [56, 180, 90];

/**
 * Blend the label tints over an RGBA image buffer (pure function, pixel
 * probeable without a canvas). Returns a new buffer; the input stays
 * untouched.
 */
export function compositeOverlay(
  image: Uint8ClampedArray,
  mask: Uint8Array,
  width: number,
  height: number,
  opacity: number,
): Uint8ClampedArray<ArrayBuffer> {
  if (image.length !== width * height * 4) {
    throw new Error("image buffer does not match dimensions");
  }
  if (mask.length !== width * height) {
    throw new Error("mask dimensions do not match the image");
  }
  const out = new Uint8ClampedArray(image.length);
  out.set(image);
  if (opacity <= 0) return out;
  const a = Math.min(1, opacity);
  for (let i = 0; i < mask.length; i++) {
    const tint = mask[i] ? FG_TINT : BG_TINT;
    const o = i * 4;
    out[o] = out[o] * (1 - a) + tint[0] * a;
    out[o + 1] = out[o + 1] * (1 - a) + tint[1] * a;
    out[o + 2] = out[o + 2] * (1 - a) + tint[2] * a;
  }
  return out;
}

/**
 * Draw the image with its mask overlay onto a canvas. Throws on dimension
 * mismatch before touching the canvas, so a failed render never leaves a
 * partial frame behind.
 */
export function drawOverlay(
  ctx: CanvasRenderingContext2D,
  image: ImageData,
  mask: Uint8Array | null,
  opacity: number,
): void {
  if (mask && mask.length !== image.width * image.height) {
    throw new Error("mask dimensions do not match the image");
  }
  let pixels: Uint8ClampedArray<ArrayBuffer>;
  if (mask && opacity > 0) {
    pixels = compositeOverlay(image.data, mask, image.width, image.height, opacity);
  } else {
    pixels = new Uint8ClampedArray(image.data.length);
    pixels.set(image.data);
  }
  ctx.putImageData(new ImageData(pixels, image.width, image.height), 0, 0);
}
