import * as fs from "fs";

import { Plane } from "./tensor";

/** Binary PGM (P5, maxval 255) reader/writer for grayscale input images. */

export function readPgm(path: string): Plane {
  const buf = fs.readFileSync(path);
  let pos = 0;

  const nextToken = (): string => {
    let tok = "";
    while (pos < buf.length) {
      const ch = String.fromCharCode(buf[pos]);
      if (ch === "#") {
        while (pos < buf.length && buf[pos] !== 0x0a) pos++;
        continue;
      }
      if (/\s/.test(ch)) {
        pos++;
        if (tok) return tok;
        continue;
      }
      tok += ch;
      pos++;
    }
    if (!tok) throw new Error(`${path}: truncated PGM header`);
    return tok;
  };

  if (nextToken() !== "P5") {
    throw new Error(`${path}: not a binary PGM (P5) file`);
  }
  const w = parseInt(nextToken(), 10);
  const h = parseInt(nextToken(), 10);
  const maxval = parseInt(nextToken(), 10);
  if (!(w >= 1 && h >= 1)) {
    throw new Error(`${path}: invalid PGM dimensions ${w}x${h}`);
  }
  if (maxval !== 255) {
    throw new Error(`${path}: unsupported PGM maxval ${maxval}, only 255`);
  }
  if (buf.length - pos !== w * h) {
    throw new Error(`${path}: payload is ${buf.length - pos} bytes, expected ${w * h}`);
  }
  const data = new Float64Array(w * h);
  for (let i = 0; i < data.length; i++) {
    data[i] = buf[pos + i];
  }
  return { h, w, data };
}

export function writePgm(path: string, plane: Plane): void {
  const header = Buffer.from(`P5\n${plane.w} ${plane.h}\n255\n`, "ascii");
  const payload = Buffer.alloc(plane.w * plane.h);
  for (let i = 0; i < payload.length; i++) {
    const v = Math.round(plane.data[i]);
    payload[i] = v < 0 ? 0 : v > 255 ? 255 : v;
  }
  fs.writeFileSync(path, Buffer.concat([header, payload]));
}
