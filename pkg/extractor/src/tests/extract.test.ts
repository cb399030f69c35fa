import assert from "node:assert/strict";
import { test } from "node:test";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { main } from "../cli";
import { extract } from "../extract";
import { makeCheckpoint, saveCheckpoint, loadModel, forward } from "../model";
import { readNpy } from "../npy";
import { writePgm } from "../pgm";
import { tensor3, zerosPlane } from "../tensor";

function fixtureDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "extract-"));
}

function writeFixtureImage(file: string, size = 48): void {
  // bright blob on a gradient background, enough structure to excite filters
  const img = zerosPlane(size, size);
  for (let y = 0; y < size; y++) {
    for (let x = 0; x < size; x++) {
      const blob = 200 * Math.exp(-((x - 30) ** 2 + (y - 18) ** 2) / 40);
      img.data[y * size + x] = Math.min(255, 40 + (x / size) * 60 + blob);
    }
  }
  writePgm(file, img);
}

function setup(size = 64): { dir: string; ckpt: string; image: string } {
  const dir = fixtureDir();
  const ckpt = path.join(dir, "model.json");
  saveCheckpoint(ckpt, makeCheckpoint(7, size, 8));
  const image = path.join(dir, "input.pgm");
  writeFixtureImage(image);
  return { dir, ckpt, image };
}

test("both maps have the declared resolution and are nonnegative", () => {
  const { dir, ckpt, image } = setup();
  const outHeat = path.join(dir, "heat.npy");
  const outGrad = path.join(dir, "grad.npy");
  extract({
    checkpointPath: ckpt,
    imagePath: image,
    classIndex: 3,
    outHeatPath: outHeat,
    outGradPath: outGrad,
  });
  for (const file of [outHeat, outGrad]) {
    const arr = readNpy(file);
    assert.equal(arr.rows, 64);
    assert.equal(arr.cols, 64);
    for (const v of arr.data) {
      assert.ok(v >= 0, `negative value ${v} in ${file}`);
    }
  }
  fs.rmSync(dir, { recursive: true });
});

test("gradient map is not identically zero", () => {
  const { dir, ckpt, image } = setup();
  const outGrad = path.join(dir, "grad.npy");
  extract({
    checkpointPath: ckpt,
    imagePath: image,
    classIndex: 0,
    outHeatPath: path.join(dir, "heat.npy"),
    outGradPath: outGrad,
  });
  const grad = readNpy(outGrad);
  let maxVal = 0;
  for (const v of grad.data) maxVal = Math.max(maxVal, v);
  assert.ok(maxVal > 0);
  fs.rmSync(dir, { recursive: true });
});

test("two runs on the same input produce byte-identical files", () => {
  const { dir, ckpt, image } = setup();
  const files: Buffer[] = [];
  for (const run of [0, 1]) {
    const outHeat = path.join(dir, `heat${run}.npy`);
    const outGrad = path.join(dir, `grad${run}.npy`);
    extract({
      checkpointPath: ckpt,
      imagePath: image,
      classIndex: 5,
      outHeatPath: outHeat,
      outGradPath: outGrad,
    });
    files.push(fs.readFileSync(outHeat), fs.readFileSync(outGrad));
  }
  assert.ok(files[0].equals(files[2]));
  assert.ok(files[1].equals(files[3]));
  fs.rmSync(dir, { recursive: true });
});

test("different classes give different maps", () => {
  const { dir, ckpt, image } = setup();
  const maps: Float32Array[] = [];
  for (const cls of [0, 1]) {
    const outGrad = path.join(dir, `grad${cls}.npy`);
    extract({
      checkpointPath: ckpt,
      imagePath: image,
      classIndex: cls,
      outHeatPath: path.join(dir, `heat${cls}.npy`),
      outGradPath: outGrad,
    });
    maps.push(readNpy(outGrad).data);
  }
  let differs = false;
  for (let i = 0; i < maps[0].length; i++) {
    if (maps[0][i] !== maps[1][i]) {
      differs = true;
      break;
    }
  }
  assert.ok(differs);
  fs.rmSync(dir, { recursive: true });
});

test("invalid class index is a reported failure", () => {
  const { dir, ckpt, image } = setup();
  const code = main([
    "extract",
    "--checkpoint", ckpt,
    "--image", image,
    "--class", "99",
    "--out-heat", path.join(dir, "h.npy"),
    "--out-grad", path.join(dir, "g.npy"),
  ]);
  assert.equal(code, 2);
  fs.rmSync(dir, { recursive: true });
});

test("missing checkpoint is a reported failure", () => {
  const dir = fixtureDir();
  const image = path.join(dir, "input.pgm");
  writeFixtureImage(image);
  const code = main([
    "extract",
    "--checkpoint", path.join(dir, "nope.json"),
    "--image", image,
    "--class", "0",
    "--out-heat", path.join(dir, "h.npy"),
    "--out-grad", path.join(dir, "g.npy"),
  ]);
  assert.equal(code, 2);
  fs.rmSync(dir, { recursive: true });
});

test("size flag must match the checkpoint input size", () => {
  const { dir, ckpt, image } = setup();
  const code = main([
    "extract",
    "--checkpoint", ckpt,
    "--image", image,
    "--class", "0",
    "--size", "32",
    "--out-heat", path.join(dir, "h.npy"),
    "--out-grad", path.join(dir, "g.npy"),
  ]);
  assert.equal(code, 2);
  fs.rmSync(dir, { recursive: true });
});

test("checkpoints are reproducible from the seed and load back", () => {
  const dir = fixtureDir();
  const a = path.join(dir, "a.json");
  const b = path.join(dir, "b.json");
  saveCheckpoint(a, makeCheckpoint(123, 32, 4, [4, 8]));
  saveCheckpoint(b, makeCheckpoint(123, 32, 4, [4, 8]));
  assert.ok(fs.readFileSync(a).equals(fs.readFileSync(b)));
  const model = loadModel(a);
  assert.equal(model.stages.length, 2);
  assert.equal(model.numClasses, 4);
  // forward pass produces finite scores for a mid-gray input
  const input = new Float64Array(32 * 32).fill(0.5);
  const cache = forward(model, tensor3(1, 32, 32, input));
  assert.equal(cache.scores.length, 4);
  for (const s of cache.scores) {
    assert.ok(Number.isFinite(s));
  }
  fs.rmSync(dir, { recursive: true });
});
