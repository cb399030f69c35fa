import { Plane, zerosPlane } from "./tensor";

/**
 * Bilinear resampling with corner alignment on pixel centers
 * (source coordinate = (target + 0.5) * scale - 0.5, clamped).
 */
export function bilinearResize(src: Plane, outH: number, outW: number): Plane {
  if (outH < 1 || outW < 1) {
    throw new Error(`invalid resize target ${outW}x${outH}`);
  }
  if (src.h === outH && src.w === outW) {
    return { h: src.h, w: src.w, data: src.data.slice() };
  }
  const out = zerosPlane(outH, outW);
  const scaleY = src.h / outH;
  const scaleX = src.w / outW;
  for (let oy = 0; oy < outH; oy++) {
    let sy = (oy + 0.5) * scaleY - 0.5;
    if (sy < 0) sy = 0;
    if (sy > src.h - 1) sy = src.h - 1;
    const y0 = Math.floor(sy);
    const y1 = Math.min(y0 + 1, src.h - 1);
    const fy = sy - y0;
    for (let ox = 0; ox < outW; ox++) {
      let sx = (ox + 0.5) * scaleX - 0.5;
      if (sx < 0) sx = 0;
      if (sx > src.w - 1) sx = src.w - 1;
      const x0 = Math.floor(sx);
      const x1 = Math.min(x0 + 1, src.w - 1);
      const fx = sx - x0;
      const top = src.data[y0 * src.w + x0] * (1 - fx) + src.data[y0 * src.w + x1] * fx;
      const bottom = src.data[y1 * src.w + x0] * (1 - fx) + src.data[y1 * src.w + x1] * fx;
      out.data[oy * outW + ox] = top * (1 - fy) + bottom * fy;
    }
  }
  return out;
}
