import * as fs from "fs";

/**
 * NPY subset writer/reader: version 1.0 header, C order, little-endian
 * float32, exactly two dimensions. This matches the format the box
 * pipeline's loader accepts.
 */

const MAGIC = Buffer.from("\x93NUMPY", "latin1");

export function npyBytes(rows: number, cols: number, values: ArrayLike<number>): Buffer {
  if (rows < 1 || cols < 1) {
    throw new Error(`invalid NPY shape ${rows}x${cols}`);
  }
  if (values.length !== rows * cols) {
    throw new Error(`value count ${values.length} != ${rows}*${cols}`);
  }
  let header = `{'descr': '<f4', 'fortran_order': False, 'shape': (${rows}, ${cols}), }`;
  const base = MAGIC.length + 2 + 2 + header.length + 1;
  header = header + " ".repeat((64 - (base % 64)) % 64) + "\n";

  const out = Buffer.alloc(MAGIC.length + 4 + header.length + rows * cols * 4);
  let off = 0;
  MAGIC.copy(out, off);
  off += MAGIC.length;
  out[off++] = 1; // major version
  out[off++] = 0; // minor version
  out.writeUInt16LE(header.length, off);
  off += 2;
  out.write(header, off, "latin1");
  off += header.length;
  for (let i = 0; i < values.length; i++) {
    out.writeFloatLE(Math.fround(values[i]), off + i * 4);
  }
  return out;
}

export function writeNpy(
  path: string,
  rows: number,
  cols: number,
  values: ArrayLike<number>,
): void {
  fs.writeFileSync(path, npyBytes(rows, cols, values));
}

export interface NpyArray {
  rows: number;
  cols: number;
  data: Float32Array;
}

export function readNpy(path: string): NpyArray {
  const buf = fs.readFileSync(path);
  if (!buf.subarray(0, 6).equals(MAGIC)) {
    throw new Error(`${path}: bad NPY magic`);
  }
  if (buf[6] !== 1 || buf[7] !== 0) {
    throw new Error(`${path}: unsupported NPY version ${buf[6]}.${buf[7]}`);
  }
  const headerLen = buf.readUInt16LE(8);
  const header = buf.subarray(10, 10 + headerLen).toString("latin1");
  const shapeMatch = header.match(/'shape':\s*\((\d+),\s*(\d+)\s*,?\)/);
  if (!header.includes("'<f4'") || !shapeMatch) {
    throw new Error(`${path}: not a 2-D little-endian float32 NPY`);
  }
  if (header.includes("'fortran_order': True")) {
    throw new Error(`${path}: Fortran order unsupported`);
  }
  const rows = parseInt(shapeMatch[1], 10);
  const cols = parseInt(shapeMatch[2], 10);
  const start = 10 + headerLen;
  const expected = rows * cols * 4;
  if (buf.length - start !== expected) {
    throw new Error(`${path}: payload is ${buf.length - start} bytes, expected ${expected}`);
  }
  const data = new Float32Array(rows * cols);
  for (let i = 0; i < data.length; i++) {
    data[i] = buf.readFloatLE(start + i * 4);
  }
  return { rows, cols, data };
}
