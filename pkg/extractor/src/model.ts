import * as fs from "fs";

import {
  ConvWeights,
  HeadWeights,
  KERNEL,
  PoolResult,
  conv2dForward,
  globalAveragePool,
  headForward,
  maxPool2Forward,
  reluForward,
} from "./nn";
import { mulberry32, uniformArray } from "./prng";
import { Tensor3 } from "./tensor";

/**
 * Checkpoint-defined CNN: N stages of (3x3 conv -> ReLU -> 2x2 maxpool),
 * then global average pooling and a linear classification head. The input
 * size must be divisible by 2^N so every stage can pool.
 *
 * Weights are stored as base64-encoded little-endian float32 so
 * checkpoints stay compact, byte-stable, and platform independent.
 */

export const CHECKPOINT_FORMAT = "cnn-checkpoint-v1";

interface StageJson {
  outChannels: number;
  weight: string;
  bias: string;
}

interface CheckpointJson {
  format: string;
  inputSize: number;
  inChannels: number;
  numClasses: number;
  stages: StageJson[];
  head: { weight: string; bias: string };
}

export interface Model {
  inputSize: number;
  inChannels: number;
  numClasses: number;
  stages: ConvWeights[];
  head: HeadWeights;
}

function encodeF32(values: Float64Array): string {
  const buf = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) {
    buf.writeFloatLE(Math.fround(values[i]), i * 4);
  }
  return buf.toString("base64");
}

function decodeF32(text: string, expected: number, what: string): Float64Array {
  const buf = Buffer.from(text, "base64");
  if (buf.length !== expected * 4) {
    throw new Error(`checkpoint field ${what} has ${buf.length / 4} values, expected ${expected}`);
  }
  const out = new Float64Array(expected);
  for (let i = 0; i < expected; i++) {
    out[i] = buf.readFloatLE(i * 4);
  }
  return out;
}

export function makeCheckpoint(
  seed: number,
  inputSize: number,
  numClasses: number,
  channels: number[] = [8, 16, 32, 64],
): CheckpointJson {
  const divisor = 2 ** channels.length;
  if (inputSize % divisor !== 0 || inputSize < divisor) {
    throw new Error(`input size ${inputSize} must be a positive multiple of ${divisor}`);
  }
  if (numClasses < 1) {
    throw new Error(`numClasses must be positive, got ${numClasses}`);
  }
  const rand = mulberry32(seed);
  const stages: StageJson[] = [];
  let inC = 1;
  for (const outC of channels) {
    const fanIn = inC * KERNEL * KERNEL;
    const limit = Math.sqrt(6 / fanIn);
    stages.push({
      outChannels: outC,
      weight: encodeF32(uniformArray(rand, outC * inC * KERNEL * KERNEL, limit)),
      bias: encodeF32(uniformArray(rand, outC, 0.05)),
    });
    inC = outC;
  }
  const features = channels[channels.length - 1];
  return {
    format: CHECKPOINT_FORMAT,
    inputSize,
    inChannels: 1,
    numClasses,
    stages,
    head: {
      weight: encodeF32(uniformArray(rand, numClasses * features, Math.sqrt(6 / features))),
      bias: encodeF32(uniformArray(rand, numClasses, 0.05)),
    },
  };
}

export function saveCheckpoint(path: string, ckpt: CheckpointJson): void {
  fs.writeFileSync(path, JSON.stringify(ckpt, null, 1) + "\n");
}

export function loadModel(path: string): Model {
  let parsed: CheckpointJson;
  try {
    parsed = JSON.parse(fs.readFileSync(path, "utf-8"));
  } catch (err) {
    throw new Error(`cannot load checkpoint ${path}: ${(err as Error).message}`);
  }
  if (parsed.format !== CHECKPOINT_FORMAT) {
    throw new Error(`${path}: unknown checkpoint format ${parsed.format ?? "(missing)"}`);
  }
  if (!Array.isArray(parsed.stages) || parsed.stages.length < 1) {
    throw new Error(`${path}: checkpoint has no convolution stages`);
  }
  const stages: ConvWeights[] = [];
  let inC = parsed.inChannels;
  parsed.stages.forEach((stage, i) => {
    stages.push({
      inC,
      outC: stage.outChannels,
      weight: decodeF32(
        stage.weight,
        stage.outChannels * inC * KERNEL * KERNEL,
        `stages[${i}].weight`,
      ),
      bias: decodeF32(stage.bias, stage.outChannels, `stages[${i}].bias`),
    });
    inC = stage.outChannels;
  });
  const features = inC;
  const head: HeadWeights = {
    features,
    numClasses: parsed.numClasses,
    weight: decodeF32(parsed.head.weight, parsed.numClasses * features, "head.weight"),
    bias: decodeF32(parsed.head.bias, parsed.numClasses, "head.bias"),
  };
  return {
    inputSize: parsed.inputSize,
    inChannels: parsed.inChannels,
    numClasses: parsed.numClasses,
    stages,
    head,
  };
}

/** Per-stage activations saved for the backward passes. */
export interface StageCache {
  convIn: Tensor3;
  preActivation: Tensor3;
  activated: Tensor3;
  pool: PoolResult;
}

export interface ForwardCache {
  stages: StageCache[];
  /** output of the final stage (feeds global average pooling). */
  features: Tensor3;
  pooled: Float64Array;
  scores: Float64Array;
}

export function forward(model: Model, input: Tensor3): ForwardCache {
  if (input.c !== model.inChannels || input.h !== model.inputSize || input.w !== model.inputSize) {
    throw new Error(
      `input must be ${model.inChannels}x${model.inputSize}x${model.inputSize}, ` +
        `got ${input.c}x${input.h}x${input.w}`,
    );
  }
  const stages: StageCache[] = [];
  let x = input;
  for (const wts of model.stages) {
    const preActivation = conv2dForward(x, wts);
    const activated = reluForward(preActivation);
    const pool = maxPool2Forward(activated);
    stages.push({ convIn: x, preActivation, activated, pool });
    x = pool.out;
  }
  const pooled = globalAveragePool(x);
  const scores = headForward(pooled, model.head);
  return { stages, features: x, pooled, scores };
}
