import { featureGradients } from "./gradcampp";
import { ForwardCache, Model } from "./model";
import {
  conv2dBackwardInput,
  maxPool2Backward,
  reluBackwardGuided,
} from "./nn";
import { Plane, Tensor3 } from "./tensor";

/**
 * Guided backpropagation: run the class score's gradient back to the
 * input image, gating every ReLU by both its forward sign and the sign of
 * the incoming gradient, then reduce channels by max of absolute value.
 */
export function guidedBackprop(
  model: Model,
  cache: ForwardCache,
  classIndex: number,
): Plane {
  if (classIndex < 0 || classIndex >= model.numClasses) {
    throw new Error(`class index ${classIndex} out of range [0, ${model.numClasses})`);
  }
  let grad: Tensor3 = featureGradients(model, cache, classIndex);
  for (let s = model.stages.length - 1; s >= 0; s--) {
    const stageCache = cache.stages[s];
    grad = maxPool2Backward(
      grad,
      stageCache.pool.argmax,
      stageCache.activated.h,
      stageCache.activated.w,
    );
    grad = reluBackwardGuided(grad, stageCache.preActivation);
    grad = conv2dBackwardInput(grad, model.stages[s]);
  }

  // max |grad| over input channels -> single high-resolution plane
  const plane = grad.h * grad.w;
  const out = new Float64Array(plane);
  for (let ci = 0; ci < grad.c; ci++) {
    for (let i = 0; i < plane; i++) {
      const v = Math.abs(grad.data[ci * plane + i]);
      if (v > out[i]) out[i] = v;
    }
  }
  return { h: grad.h, w: grad.w, data: out };
}
