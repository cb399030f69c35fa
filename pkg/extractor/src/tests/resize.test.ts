import assert from "node:assert/strict";
import { test } from "node:test";

import { bilinearResize } from "../resize";

test("identity resize copies the plane", () => {
  const src = { h: 2, w: 2, data: Float64Array.from([1, 2, 3, 4]) };
  const out = bilinearResize(src, 2, 2);
  assert.deepEqual(Array.from(out.data), [1, 2, 3, 4]);
  assert.notEqual(out.data, src.data);
});

test("constant planes stay constant at any size", () => {
  const src = { h: 3, w: 5, data: new Float64Array(15).fill(7) };
  const out = bilinearResize(src, 64, 64);
  for (const v of out.data) {
    assert.equal(v, 7);
  }
});

test("2x2 to 4x4 matches hand-computed pixel-center interpolation", () => {
  const src = { h: 2, w: 2, data: Float64Array.from([0, 10, 20, 30]) };
  const out = bilinearResize(src, 4, 4);
  const expected = [
    0, 2.5, 7.5, 10,
    5, 7.5, 12.5, 15,
    15, 17.5, 22.5, 25,
    20, 22.5, 27.5, 30,
  ];
  for (let i = 0; i < expected.length; i++) {
    assert.ok(Math.abs(out.data[i] - expected[i]) < 1e-12, `cell ${i}`);
  }
});

test("values never leave the source range", () => {
  const src = { h: 4, w: 4, data: Float64Array.from({ length: 16 }, (_, i) => i * 3) };
  const out = bilinearResize(src, 37, 11);
  for (const v of out.data) {
    assert.ok(v >= 0 && v <= 45);
  }
});
