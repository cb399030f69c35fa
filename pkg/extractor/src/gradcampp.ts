import { ForwardCache, Model } from "./model";
import { bilinearResize } from "./resize";
import { Plane, Tensor3, zerosPlane } from "./tensor";

/**
 * Grad-CAM++ on the final convolutional stage's feature maps.
 *
 * With feature maps A^k and class-score gradients g = dS_c/dA^k:
 *   alpha_ij^k = g_ij^2 / (2 g_ij^2 + sum_ab A_ab^k g_ij^3)
 *   w_k        = sum_ij alpha_ij^k * relu(g_ij)
 *   cam        = relu(sum_k w_k A^k)
 * The cam is bilinearly upsampled to the network input resolution, so it
 * is nonnegative by construction and aligned with the gradient map.
 */

/** dS_c/dA for the stage feeding GAP + linear head: w_ck / (plane size). */
export function featureGradients(model: Model, cache: ForwardCache, classIndex: number): Tensor3 {
  const features = cache.features;
  const plane = features.h * features.w;
  const grads = new Float64Array(features.data.length);
  for (let k = 0; k < features.c; k++) {
    const g = model.head.weight[classIndex * model.head.features + k] / plane;
    grads.fill(g, k * plane, (k + 1) * plane);
  }
  return { c: features.c, h: features.h, w: features.w, data: grads };
}

export function gradCamPlusPlus(
  model: Model,
  cache: ForwardCache,
  classIndex: number,
): Plane {
  if (classIndex < 0 || classIndex >= model.numClasses) {
    throw new Error(`class index ${classIndex} out of range [0, ${model.numClasses})`);
  }
  const features = cache.features;
  const grads = featureGradients(model, cache, classIndex);
  const plane = features.h * features.w;

  const cam = zerosPlane(features.h, features.w);
  for (let k = 0; k < features.c; k++) {
    let channelSum = 0;
    for (let i = 0; i < plane; i++) {
      channelSum += features.data[k * plane + i];
    }
    let weight = 0;
    for (let i = 0; i < plane; i++) {
      const g = grads.data[k * plane + i];
      const g2 = g * g;
      const denom = 2 * g2 + channelSum * g2 * g;
      const alpha = denom !== 0 ? g2 / denom : 0;
      weight += alpha * (g > 0 ? g : 0);
    }
    for (let i = 0; i < plane; i++) {
      cam.data[i] += weight * features.data[k * plane + i];
    }
  }
  for (let i = 0; i < cam.data.length; i++) {
    if (cam.data[i] < 0) cam.data[i] = 0;
  }
  return bilinearResize(cam, model.inputSize, model.inputSize);
}
