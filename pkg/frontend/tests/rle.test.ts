import { describe, expect, it } from "vitest";
import { decodeRle, diceCoefficient, encodeRle } from "../src/rle.js";

describe("rle", () => {
  it("decodes a simple document", () => {
    const bits = decodeRle({ v: 1, width: 3, height: 2, rle: [[0, 2], [1, 3], [0, 1]] });
    expect(Array.from(bits)).toEqual([0, 0, 1, 1, 1, 0]);
  });

  it("round-trips random masks", () => {
    let state = 12345;
    const rand = () => (state = (state * 1103515245 + 12345) % 2 ** 31) / 2 ** 31;
    for (let trial = 0; trial < 20; trial++) {
      const w = 1 + Math.floor(rand() * 40);
      const h = 1 + Math.floor(rand() * 40);
      const bits = new Uint8Array(w * h).map(() => (rand() < 0.4 ? 1 : 0));
      const doc = encodeRle(bits, w, h);
      expect(Array.from(decodeRle(doc))).toEqual(Array.from(bits));
    }
  });

  it("rejects size mismatches", () => {
    expect(() => decodeRle({ v: 1, width: 2, height: 2, rle: [[1, 3]] })).toThrow();
    expect(() => decodeRle({ v: 1, width: 2, height: 2, rle: [[1, 5]] })).toThrow();
  });

  it("computes dice", () => {
    const a = new Uint8Array([1, 1, 0, 0]);
    const b = new Uint8Array([1, 0, 1, 0]);
    expect(diceCoefficient(a, b)).toBeCloseTo(0.5, 12);
    expect(diceCoefficient(new Uint8Array(4), new Uint8Array(4))).toBe(1);
  });
});
