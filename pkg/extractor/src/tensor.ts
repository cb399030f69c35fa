/**
 * Minimal CHW feature-map container over a Float64Array.
 *
 * All math runs in float64 with fixed loop order so repeated runs are
 * bit-identical; values are narrowed to float32 only when written out.
 */
export interface Tensor3 {
  readonly c: number;
  readonly h: number;
  readonly w: number;
  readonly data: Float64Array;
}

export function zeros3(c: number, h: number, w: number): Tensor3 {
  return { c, h, w, data: new Float64Array(c * h * w) };
}

export function tensor3(c: number, h: number, w: number, data: Float64Array): Tensor3 {
  if (data.length !== c * h * w) {
    throw new Error(`tensor data length ${data.length} != ${c}*${h}*${w}`);
  }
  return { c, h, w, data };
}

export function at(t: Tensor3, ci: number, y: number, x: number): number {
  return t.data[(ci * t.h + y) * t.w + x];
}

/** 2-D plane helpers (single-channel maps). */
export interface Plane {
  readonly h: number;
  readonly w: number;
  readonly data: Float64Array;
}

export function zerosPlane(h: number, w: number): Plane {
  return { h, w, data: new Float64Array(h * w) };
}

export function planeOfChannel(t: Tensor3, ci: number): Plane {
  const n = t.h * t.w;
  const data = new Float64Array(n);
  data.set(t.data.subarray(ci * n, (ci + 1) * n));
  return { h: t.h, w: t.w, data };
}
