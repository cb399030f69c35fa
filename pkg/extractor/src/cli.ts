import { extract } from "./extract";
import { makeCheckpoint, saveCheckpoint } from "./model";

/**
 * Command line:
 *   extract --checkpoint CK.json --image IMG.pgm --class N
 *           --out-heat H.npy --out-grad G.npy [--size S]
 *   make-checkpoint --out CK.json [--seed N] [--size S] [--classes N]
 */

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`expected --flag value pairs, got ${argv.slice(i).join(" ")}`);
    }
    flags.set(key.slice(2), value);
  }
  return flags;
}

function required(flags: Map<string, string>, name: string): string {
  const value = flags.get(name);
  if (value === undefined) {
    throw new Error(`missing required flag --${name}`);
  }
  return value;
}

function intFlag(flags: Map<string, string>, name: string, fallback?: number): number {
  const raw = flags.get(name);
  if (raw === undefined) {
    if (fallback === undefined) throw new Error(`missing required flag --${name}`);
    return fallback;
  }
  const value = parseInt(raw, 10);
  if (!Number.isFinite(value)) {
    throw new Error(`flag --${name} must be an integer, got ${raw}`);
  }
  return value;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "extract") {
      const flags = parseFlags(rest);
      const sizeRaw = flags.get("size");
      const result = extract({
        checkpointPath: required(flags, "checkpoint"),
        imagePath: required(flags, "image"),
        classIndex: intFlag(flags, "class"),
        outHeatPath: required(flags, "out-heat"),
        outGradPath: required(flags, "out-grad"),
        size: sizeRaw === undefined ? undefined : parseInt(sizeRaw, 10),
      });
      console.log(
        `wrote ${result.size}x${result.size} heatmap and gradient map for class ` +
          `${flags.get("class")}`,
      );
      return 0;
    }
    if (command === "make-checkpoint") {
      const flags = parseFlags(rest);
      const out = required(flags, "out");
      const ckpt = makeCheckpoint(
        intFlag(flags, "seed", 0),
        intFlag(flags, "size", 64),
        intFlag(flags, "classes", 8),
      );
      saveCheckpoint(out, ckpt);
      console.log(`wrote checkpoint to ${out}`);
      return 0;
    }
    console.error(
      "usage: cli.js <extract|make-checkpoint> --flag value ...",
    );
    return 1;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 2;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
