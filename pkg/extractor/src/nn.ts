import { Tensor3, zeros3 } from "./tensor";

/**
 * Forward and input-gradient ops for a plain conv/ReLU/maxpool CNN.
 *
 * Only gradients with respect to activations are implemented; weights are
 * frozen (the extractor consumes pretrained checkpoints, it never trains).
 */

export interface ConvWeights {
  /** [outC, inC, k, k] flattened, k = 3. */
  weight: Float64Array;
  bias: Float64Array;
  inC: number;
  outC: number;
}

export const KERNEL = 3;
export const PAD = 1;

/** 3x3 stride-1 pad-1 convolution. */
export function conv2dForward(x: Tensor3, wts: ConvWeights): Tensor3 {
  if (x.c !== wts.inC) {
    throw new Error(`conv input has ${x.c} channels, weights expect ${wts.inC}`);
  }
  const out = zeros3(wts.outC, x.h, x.w);
  for (let co = 0; co < wts.outC; co++) {
    const bias = wts.bias[co];
    for (let oy = 0; oy < x.h; oy++) {
      for (let ox = 0; ox < x.w; ox++) {
        let acc = bias;
        for (let ci = 0; ci < x.c; ci++) {
          for (let ky = 0; ky < KERNEL; ky++) {
            const iy = oy + ky - PAD;
            if (iy < 0 || iy >= x.h) continue;
            for (let kx = 0; kx < KERNEL; kx++) {
              const ix = ox + kx - PAD;
              if (ix < 0 || ix >= x.w) continue;
              acc +=
                wts.weight[((co * wts.inC + ci) * KERNEL + ky) * KERNEL + kx] *
                x.data[(ci * x.h + iy) * x.w + ix];
            }
          }
        }
        out.data[(co * x.h + oy) * x.w + ox] = acc;
      }
    }
  }
  return out;
}

/** Gradient of the convolution with respect to its input (full correlation). */
export function conv2dBackwardInput(gradOut: Tensor3, wts: ConvWeights): Tensor3 {
  const gradIn = zeros3(wts.inC, gradOut.h, gradOut.w);
  for (let ci = 0; ci < wts.inC; ci++) {
    for (let iy = 0; iy < gradOut.h; iy++) {
      for (let ix = 0; ix < gradOut.w; ix++) {
        let acc = 0;
        for (let co = 0; co < wts.outC; co++) {
          for (let ky = 0; ky < KERNEL; ky++) {
            const oy = iy - ky + PAD;
            if (oy < 0 || oy >= gradOut.h) continue;
            for (let kx = 0; kx < KERNEL; kx++) {
              const ox = ix - kx + PAD;
              if (ox < 0 || ox >= gradOut.w) continue;
              acc +=
                wts.weight[((co * wts.inC + ci) * KERNEL + ky) * KERNEL + kx] *
                gradOut.data[(co * gradOut.h + oy) * gradOut.w + ox];
            }
          }
        }
        gradIn.data[(ci * gradOut.h + iy) * gradOut.w + ix] = acc;
      }
    }
  }
  return gradIn;
}

export function reluForward(x: Tensor3): Tensor3 {
  const out = zeros3(x.c, x.h, x.w);
  for (let i = 0; i < x.data.length; i++) {
    out.data[i] = x.data[i] > 0 ? x.data[i] : 0;
  }
  return out;
}

/**
 * Guided ReLU backward: the gradient passes only where the forward input
 * was positive AND the incoming gradient is positive. With only the first
 * gate this would be the plain ReLU backward.
 */
export function reluBackwardGuided(gradOut: Tensor3, savedInput: Tensor3): Tensor3 {
  const gradIn = zeros3(gradOut.c, gradOut.h, gradOut.w);
  for (let i = 0; i < gradOut.data.length; i++) {
    gradIn.data[i] =
      savedInput.data[i] > 0 && gradOut.data[i] > 0 ? gradOut.data[i] : 0;
  }
  return gradIn;
}

export interface PoolResult {
  out: Tensor3;
  /** flat input index (within the channel plane) of each max. */
  argmax: Int32Array;
}

/** 2x2 stride-2 max pooling; input sides must be even. */
export function maxPool2Forward(x: Tensor3): PoolResult {
  if (x.h % 2 !== 0 || x.w % 2 !== 0) {
    throw new Error(`pooling needs even sides, got ${x.w}x${x.h}`);
  }
  const oh = x.h / 2;
  const ow = x.w / 2;
  const out = zeros3(x.c, oh, ow);
  const argmax = new Int32Array(x.c * oh * ow);
  for (let ci = 0; ci < x.c; ci++) {
    for (let oy = 0; oy < oh; oy++) {
      for (let ox = 0; ox < ow; ox++) {
        let best = -Infinity;
        let bestIdx = -1;
        for (let dy = 0; dy < 2; dy++) {
          for (let dx = 0; dx < 2; dx++) {
            const idx = (oy * 2 + dy) * x.w + (ox * 2 + dx);
            const v = x.data[ci * x.h * x.w + idx];
            if (v > best) {
              best = v;
              bestIdx = idx;
            }
          }
        }
        out.data[(ci * oh + oy) * ow + ox] = best;
        argmax[(ci * oh + oy) * ow + ox] = bestIdx;
      }
    }
  }
  return { out, argmax };
}

/** Routes each gradient back to the cell that won the forward max. */
export function maxPool2Backward(
  gradOut: Tensor3,
  argmax: Int32Array,
  inH: number,
  inW: number,
): Tensor3 {
  const gradIn = zeros3(gradOut.c, inH, inW);
  const planeOut = gradOut.h * gradOut.w;
  for (let ci = 0; ci < gradOut.c; ci++) {
    for (let i = 0; i < planeOut; i++) {
      const src = ci * planeOut + i;
      gradIn.data[ci * inH * inW + argmax[src]] += gradOut.data[src];
    }
  }
  return gradIn;
}

/** Mean over each channel plane. */
export function globalAveragePool(x: Tensor3): Float64Array {
  const out = new Float64Array(x.c);
  const plane = x.h * x.w;
  for (let ci = 0; ci < x.c; ci++) {
    let acc = 0;
    for (let i = 0; i < plane; i++) {
      acc += x.data[ci * plane + i];
    }
    out[ci] = acc / plane;
  }
  return out;
}

export interface HeadWeights {
  /** [numClasses, features] flattened. */
  weight: Float64Array;
  bias: Float64Array;
  features: number;
  numClasses: number;
}

export function headForward(features: Float64Array, head: HeadWeights): Float64Array {
  if (features.length !== head.features) {
    throw new Error(`head expects ${head.features} features, got ${features.length}`);
  }
  const out = new Float64Array(head.numClasses);
  for (let c = 0; c < head.numClasses; c++) {
    let acc = head.bias[c];
    for (let f = 0; f < head.features; f++) {
      acc += head.weight[c * head.features + f] * features[f];
    }
    out[c] = acc;
  }
  return out;
}
