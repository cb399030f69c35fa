/**
 * mulberry32: tiny deterministic PRNG for checkpoint generation.
 * Good enough statistical quality for weight init, and fully reproducible
 * from a 32-bit seed on every platform.
 */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform in [-limit, limit). */
export function uniformArray(rand: () => number, n: number, limit: number): Float64Array {
  const out = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    out[i] = (rand() * 2 - 1) * limit;
  }
  return out;
}
