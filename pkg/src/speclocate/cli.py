"""Command-line entry point: generate | detect | score-masks | evaluate.

Every command is reproducible from (config, seed): identical inputs give
byte-identical CSV/JSON outputs. Exit codes: 0 success, 2 configuration
error, 3 data error, 4 degenerate histogram (noise bootstrap found no usable
noise bulk).
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import (
    RunConfig,
    derive_record_seed,
    load_config,
    parse_filters_arg,
)
from .errors import (
    ConfigError,
    DegenerateHistogramError,
    PairingError,
    SpeclocateError,
)
from .metrics import (
    EvalReport,
    EvalRow,
    boxes_from_annotations,
    match_and_score,
    read_mask,
    sweep_snr,
)
from .pipeline import (
    RadiometerPipeline,
    detections_to_json,
    dump_debug_mask,
    mask_boxes_to_timefreq,
)
from .report import plot_detection_grid, plot_eval_report
from .waveforms import random_layout, read_sigmf, synthesize_record, write_sigmf

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4


def _build_pipeline(cfg: RunConfig, filters_arg: str | None) -> RadiometerPipeline:
    filters = cfg.filters if filters_arg is None else parse_filters_arg(filters_arg)
    return RadiometerPipeline(
        radiometer=cfg.radiometer,
        cluster=cfg.cluster,
        filters=filters,
        threshold_policy=cfg.threshold_policy,
        calibration_bins=cfg.calibration_bins,
    )


def cmd_generate(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    gen = cfg.generate
    n_train = int(round(gen.records * gen.train_fraction))
    entries = []
    layouts = []
    # metadata first: all layouts drawn before any samples are synthesized
    for i in range(gen.records):
        layout = random_layout(gen.record_length,
                               derive_record_seed(cfg.seed, i), gen.ranges)
        layouts.append(layout)
        entries.append({
            "stem": f"rec_{i:04d}",
            "split": "train" if i < n_train else "test",
            "n_bursts": len(layout.bursts),
            "record_length": layout.record_length_samples,
            "layout": layout.to_dict(),
        })
    manifest = {
        "seed": cfg.seed,
        "train_fraction": gen.train_fraction,
        "records": entries,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                  sort_keys=True) + "\n")
    for entry, layout in zip(entries, layouts):
        record = synthesize_record(layout)
        write_sigmf(record, out / entry["stem"])
    print(f"wrote {gen.records} records + manifest to {out}")
    return EXIT_OK


def cmd_detect(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    pipe = _build_pipeline(cfg, args.filters)

    record = read_sigmf(args.record)
    stem = Path(args.record)
    out_dir = Path(args.out) if args.out else stem.parent
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.noise_std is not None:
        pipe.calibrate_noise_only(args.noise_std,
                                  np.random.SeedSequence([cfg.seed, 0xCA1]))
        boxes, grid = pipe.detect_grid(record.samples)
    else:
        boxes, grid = pipe.detect_grid(record.samples, calibrate_self=True)

    doc = detections_to_json(boxes, pipe.geometry, pipe.noise_model,
                             record=stem.name)
    out_json = out_dir / f"{stem.name}.detections.json"
    out_json.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if args.emit_mask:
        dump_debug_mask(grid, pipe.noise_model, out_dir / stem.name)
    if args.figure:
        plot_detection_grid(grid.stats, boxes, out_dir / f"{stem.name}.png",
                            mask=grid.mask)
    print(f"{stem.name}: {len(boxes)} detections -> {out_json}")
    return EXIT_OK


def cmd_score_masks(args) -> int:
    mask_dir = Path(args.masks)
    record_dir = Path(args.records)
    mask_paths = sorted(mask_dir.glob("*.sgm1"))
    if not mask_paths:
        raise PairingError(f"no .sgm1 masks found in {mask_dir}")
    orphans = [p.name for p in mask_paths
               if not (record_dir / f"{p.stem}.sigmf-meta").exists()]
    if orphans:
        raise PairingError(
            f"masks without records in {record_dir}: {', '.join(orphans)}"
        )

    tp = fp = p = 0
    iou_values = []
    for mask_path in mask_paths:
        record = read_sigmf(record_dir / mask_path.stem)
        mask = read_mask(mask_path, binary=True)
        preds = mask_boxes_to_timefreq(mask, len(record))
        truths = boxes_from_annotations(record)
        m = match_and_score(preds, truths, args.iou)
        tp += m.tp
        fp += m.fp
        p += m.p
        iou_values.extend(v for _, _, v in m.pairs)

    precision = tp / (tp + fp) if (tp + fp) > 0 else 1.0
    recall = tp / p if p > 0 else 1.0
    report = EvalReport(rows=[EvalRow(
        snr_db=args.snr_db, precision=precision, recall=recall,
        tp=tp, fp=fp, p=p, trials=len(mask_paths),
    )])
    out_dir = Path(args.out) if args.out else mask_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_csv(out_dir / "score.csv")
    doc = report.to_dict()
    doc["mean_matched_iou"] = (float(np.mean(iou_values)) if iou_values else None)
    doc["iou_threshold"] = args.iou
    (out_dir / "score.json").write_text(json.dumps(doc, indent=2) + "\n")
    print(f"scored {len(mask_paths)} masks: precision {precision:.4f} "
          f"recall {recall:.4f} (tp={tp} fp={fp} p={p})")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    pipe = _build_pipeline(cfg, args.filters)

    ev = cfg.evaluate
    report = sweep_snr(pipe, ev.test_layout, ev.snr_grid(),
                       ev.trials_per_step, cfg.seed, ev.iou_threshold)
    out_dir = Path(args.out) if args.out else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_csv(out_dir / "report.csv")
    report.write_json(out_dir / "report.json")
    if not args.no_figure:
        plot_eval_report(report, out_dir / "report.png",
                         title="precision / recall vs SNR")
    crossing = report.recall_crossing()
    cross_text = f"{crossing:.2f} dB" if crossing is not None else "none"
    print(f"evaluated {len(report.rows)} SNR steps "
          f"(recall 0.5-crossing: {cross_text}) -> {out_dir / 'report.csv'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speclocate",
        description="Wideband signal localization: synthesize, detect, score.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="synthesize a SigMF record set")
    p_gen.add_argument("--config", help="JSON run configuration")
    p_gen.add_argument("--seed", type=int, help="override the master seed")
    p_gen.add_argument("--out", required=True, help="output directory")
    p_gen.set_defaults(func=cmd_generate)

    p_det = sub.add_parser("detect", help="localize signals in one record")
    p_det.add_argument("record", help="record path stem (no suffix)")
    p_det.add_argument("--config", help="JSON run configuration")
    p_det.add_argument("--seed", type=int, help="override the master seed")
    p_det.add_argument("--out", help="output directory (default: beside record)")
    p_det.add_argument("--filters",
                       help="e.g. 'contained-merge,min-area=4' (overrides config)")
    p_det.add_argument("--emit-mask", action="store_true",
                       help="write the decision mask as SGM1 + noise sidecar")
    p_det.add_argument("--figure", action="store_true",
                       help="render the statistic grid and boxes to PNG")
    p_det.add_argument("--noise-std", type=float,
                       help="calibrate on synthetic noise at this level "
                            "instead of bootstrapping from the record")
    p_det.set_defaults(func=cmd_detect)

    p_sm = sub.add_parser("score-masks",
                          help="score SGM1 masks against truth records")
    p_sm.add_argument("--masks", required=True, help="directory of .sgm1 files")
    p_sm.add_argument("--records", required=True,
                      help="directory of truth SigMF records")
    p_sm.add_argument("--iou", type=float, default=0.5, help="IoU gate")
    p_sm.add_argument("--snr-db", type=float, default=float("nan"),
                      help="SNR label for the report row")
    p_sm.add_argument("--out", help="output directory (default: mask dir)")
    p_sm.set_defaults(func=cmd_score_masks)

    p_ev = sub.add_parser("evaluate", help="precision/recall over an SNR sweep")
    p_ev.add_argument("--config", help="JSON run configuration")
    p_ev.add_argument("--seed", type=int, help="override the master seed")
    p_ev.add_argument("--out", help="output directory (default: cwd)")
    p_ev.add_argument("--filters",
                      help="e.g. 'contained-merge,min-area=4' (overrides config)")
    p_ev.add_argument("--no-figure", action="store_true",
                      help="skip the PNG figure")
    p_ev.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateHistogramError as exc:
        print(
            f"degenerate histogram: {exc}\n"
            "The statistic histogram's mode sits in the lowest bins, so no "
            "noise bulk can be fitted. Likely a strong wideband signal "
            "dominates the record; calibrate with --noise-std at the known "
            "noise level instead of bootstrapping from the record.",
            file=sys.stderr,
        )
        return EXIT_DEGENERATE
    except SpeclocateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
