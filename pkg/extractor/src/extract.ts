import { gradCamPlusPlus } from "./gradcampp";
import { guidedBackprop } from "./guided";
import { forward, loadModel } from "./model";
import { writeNpy } from "./npy";
import { readPgm } from "./pgm";
import { bilinearResize } from "./resize";
import { Plane, tensor3 } from "./tensor";

export interface ExtractionJob {
  checkpointPath: string;
  imagePath: string;
  classIndex: number;
  outHeatPath: string;
  outGradPath: string;
  /** network input resolution; the image is resized to size x size. */
  size?: number;
}

export interface ExtractionResult {
  heat: Plane;
  grad: Plane;
  size: number;
}

/**
 * Run one image through the checkpoint and write both saliency maps as
 * 2-D float32 NPY at the input resolution. Inference only, fully
 * deterministic: the same job always produces byte-identical files.
 */
export function extract(job: ExtractionJob): ExtractionResult {
  const model = loadModel(job.checkpointPath);
  const size = job.size ?? model.inputSize;
  if (size !== model.inputSize) {
    throw new Error(
      `requested size ${size} does not match checkpoint input size ${model.inputSize}`,
    );
  }
  if (job.classIndex < 0 || job.classIndex >= model.numClasses) {
    throw new Error(
      `class index ${job.classIndex} out of range [0, ${model.numClasses})`,
    );
  }

  const image = readPgm(job.imagePath);
  const resized = bilinearResize(image, size, size);
  const input = new Float64Array(resized.data.length);
  for (let i = 0; i < input.length; i++) {
    input[i] = resized.data[i] / 255;
  }

  const cache = forward(model, tensor3(1, size, size, input));
  const heat = gradCamPlusPlus(model, cache, job.classIndex);
  const grad = guidedBackprop(model, cache, job.classIndex);

  writeNpy(job.outHeatPath, heat.h, heat.w, heat.data);
  writeNpy(job.outGradPath, grad.h, grad.w, grad.data);
  return { heat, grad, size };
}
