"""Command-line surface tying maps, boxgen, and evaluation together.

Subcommands: fuse, boxgen, eval, sweep, demo. Map files inside the input
directories are named `<image_id>__<label>.npy` (or .pgm); the heatmap
and gradient-map directories must use matching names.

Exit codes: 0 success, 1 usage error, 2 data error, 3 demo assertion
failure.
"""

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from salbox.boxgen import BoundingBox, generate_bbox
from salbox.errors import DataError, PipelineError
from salbox.evaluate import (
    DEFAULT_IOU_THRESHOLDS,
    EvalTable,
    PredictionRecord,
    accuracy_table,
    iou,
    scale_box,
)
from salbox.fixtures import DEMO_IMAGE_ID, DEMO_LABEL, EDGE_COLUMN, demo_fixture
from salbox.maps import (
    DEFAULT_HEAT_WEIGHT,
    DEFAULT_THRESHOLD_FRAC,
    DEFAULT_TOP_K,
    FusionParams,
    apply_mask,
    fuse,
    scale_to_255,
    threshold_mask,
)
from salbox import mapio
from salbox.overlay import save_overlay

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DEMO = 3

MAP_EXTENSIONS = (".npy", ".pgm")
FAILURE_COLUMNS = ["image_id", "label", "reason"]


def _scan_map_dir(directory: Path) -> dict[str, Path]:
    return {
        p.stem: p
        for p in sorted(directory.iterdir())
        if p.is_file() and p.suffix.lower() in MAP_EXTENSIONS
    }


def _parse_stem(stem: str):
    if "__" not in stem:
        return None
    image_id, label = stem.rsplit("__", 1)
    if not image_id or not label:
        return None
    return image_id, label


def _boxgen_one(job):
    """Process one (image, label) map pair; returns an ok or failure tuple."""
    image_id, label, heat_path, grad_path, params = job
    try:
        heat = mapio.load_map(heat_path)
        grad = mapio.load_map(grad_path)
        if heat.shape != grad.shape:
            raise DataError(
                f"map dimensions differ: heat {heat.shape[1]}x{heat.shape[0]} vs "
                f"grad {grad.shape[1]}x{grad.shape[0]}"
            )
        box = generate_bbox(heat, grad, params)
    except (PipelineError, OSError, ValueError) as exc:
        return ("failure", image_id, label, str(exc))
    h, w = heat.shape
    return ("ok", image_id, label, box.as_tuple(), w, h)


def _run_jobs(jobs, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [_boxgen_one(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_boxgen_one, jobs))


def run_boxgen(
    heat_dir,
    grad_dir,
    out_dir,
    params: FusionParams,
    workers: int = 1,
    overlays: bool = False,
    annotations_path=None,
) -> tuple[list[PredictionRecord], list[tuple[str, str, str]]]:
    """Batch map pairs -> predictions CSV (plus failures report and overlays).

    Individual bad files become failure rows; the batch keeps going.
    """
    heat_dir = Path(heat_dir)
    grad_dir = Path(grad_dir)
    out_dir = Path(out_dir)
    for d in (heat_dir, grad_dir):
        if not d.is_dir():
            raise DataError(f"map directory not found: {d}")
    truth = mapio.read_annotations(annotations_path) if annotations_path else []
    truth_by_key = {(rec.image_id, rec.label): rec for rec in truth}

    heats = _scan_map_dir(heat_dir)
    grads = _scan_map_dir(grad_dir)
    jobs = []
    failures: list[tuple[str, str, str]] = []
    for stem, heat_path in heats.items():
        parsed = _parse_stem(stem)
        if parsed is None:
            failures.append(
                (stem, "", "cannot split filename stem into <image_id>__<label>")
            )
            continue
        image_id, label = parsed
        grad_path = grads.get(stem)
        if grad_path is None:
            failures.append((image_id, label, f"no gradient map named {stem} in {grad_dir}"))
            continue
        jobs.append((image_id, label, heat_path, grad_path, params))
    for stem in sorted(grads.keys() - heats.keys()):
        image_id, label = _parse_stem(stem) or (stem, "")
        failures.append((image_id, label, f"no heatmap named {stem} in {heat_dir}"))

    if not jobs and not failures:
        print(f"warning: no map pairs found under {heat_dir}", file=sys.stderr)

    predictions: list[PredictionRecord] = []
    ok_paths: dict[tuple[str, str], tuple[Path, Path]] = {}
    for job, result in zip(jobs, _run_jobs(jobs, workers)):
        if result[0] == "failure":
            failures.append(result[1:])
            continue
        _, image_id, label, box, map_w, map_h = result
        predictions.append(
            PredictionRecord(image_id, label, BoundingBox(*box), map_w, map_h)
        )
        ok_paths[(image_id, label)] = (job[2], job[3])

    out_dir.mkdir(parents=True, exist_ok=True)
    mapio.write_predictions(predictions, out_dir / "predictions.csv")
    if failures:
        failures = sorted(failures)
        with open(out_dir / "failures.csv", "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(FAILURE_COLUMNS)
            writer.writerows(failures)
        print(f"warning: {len(failures)} map pair(s) failed; see failures.csv",
              file=sys.stderr)

    if overlays:
        overlay_dir = out_dir / "overlays"
        overlay_dir.mkdir(exist_ok=True)
        for rec in predictions:
            heat_path, grad_path = ok_paths[(rec.image_id, rec.label)]
            fused = fuse(
                scale_to_255(mapio.load_map(heat_path)),
                scale_to_255(mapio.load_map(grad_path)),
                params.t,
            )
            truth_rec = truth_by_key.get((rec.image_id, rec.label))
            truth_box = None
            if truth_rec is not None:
                truth_box = scale_box(
                    truth_rec.box,
                    (truth_rec.image_w, truth_rec.image_h),
                    (rec.map_w, rec.map_h),
                )
            save_overlay(
                fused,
                overlay_dir / f"{rec.image_id}__{rec.label}.png",
                generated=rec.box,
                truth=truth_box,
            )
    return predictions, failures


def format_eval_table(table: EvalTable) -> str:
    """Aligned text rendering, one row per (threshold, label) plus Mean."""
    names = list(table.labels) + ["Mean"]
    width = max(len("Label"), *(len(n) for n in names))
    lines = [f"{'Thresh':>6}  {'Label':<{width}}  Accuracy"]
    for i, t in enumerate(table.thresholds):
        cells = list(table.accuracy[i]) + [table.mean[i]]
        for name, value in zip(names, cells):
            text = " n/a" if math.isnan(value) else f"{value:.2f}"
            lines.append(f"{t:>6.2f}  {name:<{width}}  {text}")
    return "\n".join(lines)


def write_eval_csv(table: EvalTable, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["threshold", "label", "accuracy"])
        for i, t in enumerate(table.thresholds):
            for j, label in enumerate(table.labels):
                value = table.accuracy[i, j]
                writer.writerow([t, label, "" if math.isnan(value) else f"{value:.6f}"])
            mean = table.mean[i]
            writer.writerow([t, "Mean", "" if math.isnan(mean) else f"{mean:.6f}"])


def run_eval(predictions_path, annotations_path, thresholds, labels=None) -> EvalTable:
    preds = mapio.read_predictions(predictions_path)
    truth = mapio.read_annotations(annotations_path)
    if labels is None:
        labels = tuple(sorted({rec.label for rec in truth}))
    unknown = sorted({p.label for p in preds} - set(labels))
    if unknown:
        print(
            f"warning: excluding predictions with unknown label(s): {', '.join(unknown)}",
            file=sys.stderr,
        )
        preds = [p for p in preds if p.label in set(labels)]
    return accuracy_table(preds, truth, thresholds, labels)


def cmd_fuse(args) -> int:
    heat = scale_to_255(mapio.load_map(args.heat))
    grad = scale_to_255(mapio.load_map(args.grad))
    if heat.shape != grad.shape:
        raise DataError(
            f"map dimensions differ: heat {heat.shape[1]}x{heat.shape[0]} vs "
            f"grad {grad.shape[1]}x{grad.shape[0]}"
        )
    fused = fuse(heat, grad, args.t)
    mapio.save_map(fused, args.out)
    if args.mask_out:
        mask = threshold_mask(fused, args.threshold_frac)
        mapio.save_map(apply_mask(fused, mask), args.mask_out)
    print(f"wrote fused map to {args.out}")
    return EXIT_OK


def cmd_boxgen(args) -> int:
    params = FusionParams(
        t=args.t,
        threshold_frac=args.threshold_frac,
        top_k=args.top_k,
        expand=not args.no_expand,
    )
    predictions, failures = run_boxgen(
        args.heat_dir,
        args.grad_dir,
        args.out,
        params,
        workers=args.workers,
        overlays=args.overlays,
        annotations_path=args.annotations,
    )
    print(f"wrote {len(predictions)} box(es) to {Path(args.out) / 'predictions.csv'}")
    return EXIT_OK


def cmd_eval(args) -> int:
    table = run_eval(args.predictions, args.annotations, args.thresholds, args.labels)
    print(format_eval_table(table))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_eval_csv(table, out_dir / "eval.csv")
        print(f"wrote {out_dir / 'eval.csv'}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    heat_dir = Path(args.heat_dir)
    grad_dir = Path(args.grad_dir)
    for d in (heat_dir, grad_dir):
        if not d.is_dir():
            raise DataError(f"map directory not found: {d}")
    truth = mapio.read_annotations(args.annotations)
    labels = tuple(sorted({rec.label for rec in truth}))

    heats = _scan_map_dir(heat_dir)
    grads = _scan_map_dir(grad_dir)
    pairs = []
    for stem, heat_path in heats.items():
        parsed = _parse_stem(stem)
        if parsed is None or stem not in grads:
            continue
        heat = mapio.load_map(heat_path)
        grad = mapio.load_map(grads[stem])
        if heat.shape != grad.shape:
            continue
        pairs.append((parsed[0], parsed[1], heat, grad))
    if not pairs:
        raise DataError(f"no usable map pairs under {heat_dir}")

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for t in args.t_values:
        for frac in args.frac_values:
            params = FusionParams(
                t=t, threshold_frac=frac, top_k=args.top_k, expand=not args.no_expand
            )
            preds = []
            for image_id, label, heat, grad in pairs:
                try:
                    box = generate_bbox(heat, grad, params)
                except PipelineError:
                    continue  # undetected; still counts in the denominator
                h, w = heat.shape
                preds.append(PredictionRecord(image_id, label, box, w, h))
            table = accuracy_table(preds, truth, args.thresholds, labels)
            valid = table.mean[~np.isnan(table.mean)]
            overall = float(valid.mean()) if valid.size else math.nan
            rows.append((t, frac, overall))

    with open(out_dir / "sweep.csv", "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "threshold_frac", "mean_accuracy"])
        for t, frac, overall in rows:
            writer.writerow([t, frac, "" if math.isnan(overall) else f"{overall:.6f}"])
    best = max(rows, key=lambda r: -1.0 if math.isnan(r[2]) else r[2])
    print(f"best grid point: t={best[0]} threshold_frac={best[1]} "
          f"mean_accuracy={best[2]:.4f}")
    print(f"wrote {out_dir / 'sweep.csv'}")
    return EXIT_OK


def cmd_demo(args) -> int:
    out_dir = Path(args.out)
    heat_dir = out_dir / "heatmaps"
    grad_dir = out_dir / "gradmaps"
    heat_dir.mkdir(parents=True, exist_ok=True)
    grad_dir.mkdir(parents=True, exist_ok=True)

    heat, grad, truth = demo_fixture(args.size)
    stem = f"{DEMO_IMAGE_ID}__{DEMO_LABEL}"
    mapio.save_map(heat, heat_dir / f"{stem}.npy")
    mapio.save_map(grad, grad_dir / f"{stem}.npy")
    annotations = out_dir / "annotations.csv"
    with open(annotations, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(mapio.ANNOTATION_COLUMNS)
        writer.writerow(
            [DEMO_IMAGE_ID, DEMO_LABEL, truth.x1, truth.y1,
             truth.width, truth.height, args.size, args.size]
        )

    params = FusionParams()
    predictions, failures = run_boxgen(
        heat_dir, grad_dir, out_dir, params,
        overlays=True, annotations_path=annotations,
    )
    if failures or len(predictions) != 1:
        print("demo failed: box generation did not produce exactly one box",
              file=sys.stderr)
        return EXIT_DEMO
    box = predictions[0].box
    achieved = iou(box, truth)
    table = run_eval(out_dir / "predictions.csv", annotations, args.thresholds)
    print(format_eval_table(table))
    write_eval_csv(table, out_dir / "eval.csv")
    print(f"generated box: {box.as_tuple()}  truth box: {truth.as_tuple()}")
    print(f"demo IoU: {achieved:.4f}")
    if box.x1 <= EDGE_COLUMN:
        print("demo failed: generated box did not exclude the off-target edge",
              file=sys.stderr)
        return EXIT_DEMO
    if achieved < 0.5:
        print("demo failed: IoU below 0.5", file=sys.stderr)
        return EXIT_DEMO
    return EXIT_OK


def _float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _str_list(text: str) -> list[str]:
    values = [tok.strip() for tok in text.split(",") if tok.strip()]
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def _add_fusion_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t", type=float, default=DEFAULT_HEAT_WEIGHT,
                   help="heatmap weight in the fused map (default %(default)s)")
    p.add_argument("--threshold-frac", type=float, default=DEFAULT_THRESHOLD_FRAC,
                   help="mask cutoff as a fraction of the fused maximum "
                        "(default %(default)s)")
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K,
                   help="candidate rectangles to extract (default %(default)s)")
    p.add_argument("--no-expand", action="store_true",
                   help="disable ring expansion of candidates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="salbox",
        description="Fuse saliency maps and generate disease bounding boxes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fuse", help="fuse one heatmap/gradient-map pair")
    p.add_argument("--heat", required=True, help="heatmap file (.npy or .pgm)")
    p.add_argument("--grad", required=True, help="gradient map file (.npy or .pgm)")
    p.add_argument("--t", type=float, default=DEFAULT_HEAT_WEIGHT,
                   help="heatmap weight (default %(default)s)")
    p.add_argument("--threshold-frac", type=float, default=DEFAULT_THRESHOLD_FRAC,
                   help="cutoff fraction for --mask-out (default %(default)s)")
    p.add_argument("--out", required=True, help="output fused map file")
    p.add_argument("--mask-out", default=None,
                   help="also write the masked fused map here")
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("boxgen", help="generate boxes for a directory of map pairs")
    p.add_argument("--heat-dir", required=True)
    p.add_argument("--grad-dir", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--annotations", default=None,
                   help="optional ground-truth CSV for overlay truth boxes")
    p.add_argument("--overlays", action="store_true", help="write overlay PNGs")
    p.add_argument("--workers", type=int, default=1)
    _add_fusion_flags(p)
    p.set_defaults(func=cmd_boxgen)

    p = sub.add_parser("eval", help="score predictions against annotations")
    p.add_argument("--predictions", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--thresholds", type=_float_list,
                   default=list(DEFAULT_IOU_THRESHOLDS),
                   help="comma-separated IoU cutoffs (default 0.1..0.7)")
    p.add_argument("--labels", type=_str_list, default=None,
                   help="comma-separated label order (default: from annotations)")
    p.add_argument("--out", default=None, help="directory for eval.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="grid-search t and threshold-frac")
    p.add_argument("--heat-dir", required=True)
    p.add_argument("--grad-dir", required=True)
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--t-values", type=_float_list, required=True)
    p.add_argument("--frac-values", type=_float_list, required=True)
    p.add_argument("--thresholds", type=_float_list,
                   default=list(DEFAULT_IOU_THRESHOLDS))
    p.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--no-expand", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("demo", help="self-contained synthetic end-to-end check")
    p.add_argument("--out", default="demo-output", help="output directory")
    p.add_argument("--size", type=int, default=64, help="fixture size in pixels")
    p.add_argument("--thresholds", type=_float_list,
                   default=list(DEFAULT_IOU_THRESHOLDS))
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed its message; remap its exit codes
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PipelineError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())
