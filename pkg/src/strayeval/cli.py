"""Command-line entry point.

Subcommands bind the library into reproducible batch workflows:

    label     mask -> deterministic label map PNG + region JSON
    smooth    repair a fragmented ground-truth mask
    eval      score one prediction/ground-truth pair, or a directory batch
    pipeline  validity -> usability -> measurement gating for one frame
    gen       write a deterministic synthetic dataset directory

Exit codes are stable machine-readable outcomes: 0 success (and, for
pipeline, frame usable), 2 I/O error, 3 malformed input, 4 mask dimension
mismatch, 10 fault response triggered (pipeline frame unusable).
Reports go to stdout unless --out is given. STRAYEVAL_THREADS caps the
worker count for batch evaluation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .mask import (
    ShapeMismatchError,
    decode_mask,
    encode_gray,
    encode_gray16,
    encode_mask,
)
from .metrics import evaluate, report_to_json, reports_to_csv
from .pipeline import (
    DEFAULT_USABILITY_THRESHOLD,
    build_validity,
    decide_usability,
    gate_measurements,
    gating_report_to_dict,
    parse_measurements,
)
from .regions import Connectivity, label_components, region_properties
from .smoothing import Border, SmoothingConfig, smooth_mask
from .synth import generate_scene, scene_config_from_dict, scene_config_to_dict

__all__ = ["main", "app"]

_MASK_SUFFIXES = (".png", ".pgm")


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _load_mask(path: str) -> BinaryMask:
    return decode_mask(_read_bytes(path))


def _connectivity(flag: int) -> Connectivity:
    return Connectivity.FOUR if flag == 4 else Connectivity.EIGHT


def _smoothing_from_args(args) -> SmoothingConfig:
    border = Border.REFLECT if args.border == "reflect" else Border.ZERO_PAD
    return SmoothingConfig(
        sigma=args.sigma,
        truncate=args.truncate,
        binarize_threshold=args.threshold,
        border=border,
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text)


def _add_smoothing_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--sigma", type=float, default=1.0, help="kernel std. dev.")
    sub.add_argument(
        "--truncate", type=float, default=5.0, help="kernel cutoff in std. devs."
    )
    sub.add_argument(
        "--threshold", type=float, default=1e-12, help="binarization threshold"
    )
    sub.add_argument(
        "--border",
        choices=["reflect", "zero"],
        default="reflect",
        help="edge extension rule",
    )


def cmd_label(args) -> int:
    mask = _load_mask(args.mask)
    lm = label_components(mask, _connectivity(args.connectivity))
    if args.out_labels is not None:
        if lm.region_count > 65535:
            raise ValueError(
                f"{lm.region_count} regions exceed the 16-bit label PNG range"
            )
        Path(args.out_labels).write_bytes(encode_gray16(lm.labels))
    regions = region_properties(lm)
    doc = {
        "schema_version": 1,
        "connectivity": args.connectivity,
        "region_count": lm.region_count,
        "regions": [
            {
                "label": r.label,
                "area": r.area,
                "bbox": list(r.bbox),
                "centroid": list(r.centroid),
            }
            for r in regions
        ],
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_smooth(args) -> int:
    mask = _load_mask(args.mask)
    repaired = smooth_mask(mask, _smoothing_from_args(args))
    Path(args.out).write_bytes(encode_mask(repaired))
    return 0


def _eval_one(pred_path: Path, gt_path: Path, frame_id: str, args):
    pred = decode_mask(pred_path.read_bytes())
    gt = decode_mask(gt_path.read_bytes())
    smoothing = _smoothing_from_args(args) if args.smooth else None
    return evaluate(
        pred,
        gt,
        smoothing=smoothing,
        connectivity=_connectivity(args.connectivity),
        frame_id=frame_id,
        min_overlap_fraction=args.min_overlap_fraction,
    )


def _batch_pairs(pred_dir: Path, gt_dir: Path) -> list:
    if not pred_dir.is_dir():
        raise OSError(f"not a directory: {pred_dir}")
    if not gt_dir.is_dir():
        raise OSError(f"not a directory: {gt_dir}")
    pairs = []
    for pred_path in sorted(pred_dir.iterdir()):
        if pred_path.suffix.lower() not in _MASK_SUFFIXES:
            continue
        gt_path = gt_dir / pred_path.name
        if not gt_path.is_file():
            raise ValueError(f"no ground-truth file paired with {pred_path.name}")
        pairs.append((pred_path, gt_path, pred_path.stem))
    return pairs


def _worker_count(n_items: int) -> int:
    workers = min(n_items, os.cpu_count() or 1)
    cap = os.environ.get("STRAYEVAL_THREADS")
    if cap is not None:
        try:
            cap_n = int(cap)
        except ValueError:
            raise ValueError(f"STRAYEVAL_THREADS must be an integer, got {cap!r}")
        if cap_n < 1:
            raise ValueError(f"STRAYEVAL_THREADS must be >= 1, got {cap_n}")
        workers = min(workers, cap_n)
    return max(1, workers)


def cmd_eval(args) -> int:
    if args.batch:
        pairs = _batch_pairs(Path(args.pred), Path(args.gt))
        workers = _worker_count(len(pairs))
        if workers > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(
                    pool.map(lambda p: _eval_one(p[0], p[1], p[2], args), pairs)
                )
        else:
            reports = [_eval_one(p, g, fid, args) for p, g, fid in pairs]
        _emit(reports_to_csv(reports), args.out)
        return 0
    pred_path = Path(args.pred)
    frame_id = args.frame_id if args.frame_id is not None else pred_path.stem
    report = _eval_one(pred_path, Path(args.gt), frame_id, args)
    _emit(report_to_json(report), args.out)
    return 0


def cmd_pipeline(args) -> int:
    seg = _load_mask(args.seg)
    measurements = parse_measurements(Path(args.measurements).read_text())
    validity = build_validity(seg)
    decision = decide_usability(validity, args.threshold)
    report = gate_measurements(measurements, validity, decision, margin=args.margin)
    doc = gating_report_to_dict(report, decision)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0 if decision.usable else 10


def cmd_gen(args) -> int:
    cfg_data = json.loads(Path(args.config).read_text())
    cfg = scene_config_from_dict(cfg_data)
    if args.count < 0:
        raise ValueError(f"--count must be >= 0, got {args.count}")
    out_dir = Path(args.out_dir)
    if out_dir.exists():
        if not out_dir.is_dir():
            raise OSError(f"not a directory: {out_dir}")
        if any(out_dir.iterdir()) and not args.force:
            raise OSError(f"output directory {out_dir} is not empty (use --force)")
    out_dir.mkdir(parents=True, exist_ok=True)

    train_count = int(args.count * 0.8 + 0.5)  # round-half-up 80/20 split
    frames = []
    for i in range(args.count):
        frame_seed = args.seed + i
        scene = generate_scene(cfg, frame_seed)
        stem = f"frame_{i:04d}"
        (out_dir / f"{stem}.png").write_bytes(encode_gray(scene.image))
        (out_dir / f"{stem}_gt.png").write_bytes(encode_mask(scene.gt))
        meta = {
            "schema_version": 1,
            "index": i,
            "seed": frame_seed,
            "config": scene_config_to_dict(cfg),
            "flare_descriptors": [
                {
                    "center": list(d.center),
                    "radii": list(d.radii),
                    "angle": d.angle,
                    "peak": d.peak,
                }
                for d in scene.flare_descriptors
            ],
        }
        (out_dir / f"{stem}.json").write_text(json.dumps(meta, indent=2) + "\n")
        frames.append(
            {
                "index": i,
                "seed": frame_seed,
                "image": f"{stem}.png",
                "gt": f"{stem}_gt.png",
                "meta": f"{stem}.json",
                "split": "train" if i < train_count else "eval",
            }
        )
    manifest = {
        "schema_version": 1,
        "seed": args.seed,
        "count": args.count,
        "config": scene_config_to_dict(cfg),
        "frames": frames,
    }
    # Written last: its presence marks the directory as complete.
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strayeval",
        description="Straylight segmentation evaluation and onboard gating tools.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_label = subs.add_parser("label", help="connected-component labeling")
    p_label.add_argument("mask", help="mask PNG or PGM path")
    p_label.add_argument("--connectivity", type=int, choices=[4, 8], default=8)
    p_label.add_argument("--out-labels", default=None, help="16-bit label PNG path")
    p_label.add_argument("--out", default=None, help="region JSON path (default stdout)")
    p_label.set_defaults(func=cmd_label)

    p_smooth = subs.add_parser("smooth", help="repair a fragmented ground-truth mask")
    p_smooth.add_argument("mask", help="mask PNG or PGM path")
    _add_smoothing_flags(p_smooth)
    p_smooth.add_argument("--out", required=True, help="output mask PNG path")
    p_smooth.set_defaults(func=cmd_smooth)

    p_eval = subs.add_parser("eval", help="score prediction against ground truth")
    p_eval.add_argument("pred", help="prediction mask path (directory with --batch)")
    p_eval.add_argument("gt", help="ground-truth mask path (directory with --batch)")
    p_eval.add_argument("--batch", action="store_true", help="pair directories by filename")
    p_eval.add_argument("--smooth", action="store_true", help="repair GT before scoring")
    _add_smoothing_flags(p_eval)
    p_eval.add_argument("--connectivity", type=int, choices=[4, 8], default=8)
    p_eval.add_argument(
        "--min-overlap-fraction",
        type=float,
        default=0.0,
        help="fraction of both region areas an overlap must reach to match",
    )
    p_eval.add_argument("--frame-id", default=None, help="frame id for the report")
    p_eval.add_argument("--out", default=None, help="report path (default stdout)")
    p_eval.set_defaults(func=cmd_eval)

    p_pipe = subs.add_parser("pipeline", help="validity, usability, and gating")
    p_pipe.add_argument("seg", help="straylight segmentation mask path")
    p_pipe.add_argument("measurements", help="measurements JSONL path")
    p_pipe.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_USABILITY_THRESHOLD,
        help="max invalid fraction for a usable frame",
    )
    p_pipe.add_argument(
        "--margin", type=int, default=0, help="Chebyshev rejection margin in pixels"
    )
    p_pipe.add_argument("--out", default=None, help="report path (default stdout)")
    p_pipe.set_defaults(func=cmd_pipeline)

    p_gen = subs.add_parser("gen", help="generate a synthetic dataset directory")
    p_gen.add_argument("config", help="scene config JSON path")
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--count", type=int, default=10)
    p_gen.add_argument("--out-dir", required=True)
    p_gen.add_argument(
        "--force", action="store_true", help="write into a non-empty directory"
    )
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"strayeval: error: {exc}", file=sys.stderr)
        return 2
    except ShapeMismatchError as exc:
        print(f"strayeval: error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:  # covers mask decoding and malformed JSON inputs
        print(f"strayeval: error: {exc}", file=sys.stderr)
        return 3


def app() -> None:
    sys.exit(main())
