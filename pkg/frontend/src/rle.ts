import type { RleMask } from "./types.js";

/** Decode a run-length mask document into one byte per pixel (0 or 1). */
export function decodeRle(doc: RleMask): Uint8Array {
  const size = doc.width * doc.height;
  const out = new Uint8Array(size);
  let pos = 0;
  for (const [value, count] of doc.rle) {
    if (count < 0 || pos + count > size) {
      throw new Error(`RLE overruns ${size} pixels`);
    }
    out.fill(value ? 1 : 0, pos, pos + count);
    pos += count;
  }
  if (pos !== size) {
    throw new Error(`RLE decodes to ${pos} pixels, expected ${size}`);
  }
  return out;
}

/** Inverse of decodeRle, used by tests and fixtures. */
export function encodeRle(bits: Uint8Array, width: number, height: number): RleMask {
  if (bits.length !== width * height) {
    throw new Error("bits length must equal width*height");
  }
  const rle: [number, number][] = [];
  let i = 0;
  while (i < bits.length) {
    const value = bits[i] ? 1 : 0;
    let j = i;
    while (j < bits.length && (bits[j] ? 1 : 0) === value) j++;
    rle.push([value, j - i]);
    i = j;
  }
  return { v: 1, width, height, rle };
}

export function diceCoefficient(a: Uint8Array, b: Uint8Array): number {
  if (a.length !== b.length) throw new Error("mask sizes differ");
  let sa = 0;
  let sb = 0;
  let inter = 0;
  for (let i = 0; i < a.length; i++) {
    if (a[i]) sa++;
    if (b[i]) sb++;
    if (a[i] && b[i]) inter++;
  }
  if (sa + sb === 0) return 1;
  return (2 * inter) / (sa + sb);
}
