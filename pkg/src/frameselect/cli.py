"""Command line entry points wiring the pipeline end to end.

Subcommands mirror the pipeline stages so every intermediate artifact can
be inspected:

  score    extract per-frame features and composite scores
  select   cluster the scores and pick representative frames
  prompts  derive point/box prompts for the selected frames
  eval     score predicted masks against ground-truth masks

Outputs are deterministic for a fixed configuration: JSON is written with
sorted keys, CSV floats use shortest round-trip formatting, and --jobs
only changes wall time, never bytes. Exit codes: 0 success, 1 runtime
failure, 2 configuration error (configuration problems are aggregated
into a single message before any pixel work starts).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Optional, Sequence

from .dataset import (
    DEFAULT_SPLIT_RATIO,
    DEFAULT_SPLIT_SEED,
    Dataset,
    DatasetError,
    FrameRecord,
    SelectionManifest,
    export_scores_csv,
    ingest,
    manifest_from_membership,
    save_manifest,
    split_ids,
)
from .features import FeatureError, FeatureParams
from .metrics import EvalReport, MetricsError, evaluate_masks
from .pipeline import run_strategy
from .prompts import PROMPT_STRATEGIES, PromptError, derive_prompts
from .raster import RasterError, load_image, load_mask
from .selection import (
    SELECTION_STRATEGIES,
    STRATEGY_AFSE,
    FrameSource,
    SelectionError,
    WeightConfig,
    extract_feature_table,
    score_frames,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

DEFAULT_K = 5
DEFAULT_SEED = 2024

_RUNTIME_ERRORS = (
    DatasetError,
    FeatureError,
    MetricsError,
    PromptError,
    RasterError,
    SelectionError,
    OSError,
)


@dataclass(frozen=True)
class RunConfig:
    """A fully validated pipeline invocation."""

    command: str
    frames: tuple[FrameRecord, ...]
    reference_id: str
    weights: WeightConfig
    params: FeatureParams
    k: int
    seed: int
    strategy: str
    normalize: bool
    split: str
    jobs: int
    out_dir: Path
    prompt_strategy: Optional[str] = None


class _UsageError(Exception):
    """Aggregated configuration problems; maps to exit code 2."""

    def __init__(self, problems: list[str]):
        super().__init__("\n".join(problems))
        self.problems = problems


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frameselect",
        description="Reference-guided frame selection for interactive segmentation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pipeline_flags(p: argparse.ArgumentParser, masks_required: bool) -> None:
        p.add_argument("--input", required=True, help="directory of frames (.png/.jpg)")
        p.add_argument(
            "--masks",
            required=masks_required,
            default=None,
            help="directory of masks paired to frames by filename stem",
        )
        p.add_argument(
            "--reference",
            default=None,
            help="reference frame id (default: first frame of the active split)",
        )
        p.add_argument("--k", type=int, default=DEFAULT_K, help="clusters / frames to select")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for all randomness")
        p.add_argument(
            "--strategy",
            choices=SELECTION_STRATEGIES,
            default=STRATEGY_AFSE,
            help="frame selection strategy",
        )
        p.add_argument(
            "--weights",
            default="0.2,0.2,0.2,0.2,0.2",
            metavar="a,b,c,d,e",
            help="composite score weights for B,C,E,H,S",
        )
        p.add_argument("--canny-low", type=float, default=50.0, help="edge low threshold")
        p.add_argument("--canny-high", type=float, default=150.0, help="edge high threshold")
        p.add_argument("--bins-h", type=int, default=32, help="hue histogram bins")
        p.add_argument("--bins-s", type=int, default=32, help="saturation histogram bins")
        p.add_argument(
            "--normalize-features",
            action="store_true",
            help="min-max normalize features over the dataset before weighting",
        )
        p.add_argument(
            "--split",
            choices=("all", "train", "val"),
            default="all",
            help="run on all frames or one side of the fixed 7:3 split (seed 2024)",
        )
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")
        p.add_argument("--out", required=True, help="output directory")

    p_score = sub.add_parser("score", help="per-frame features and composite scores")
    add_pipeline_flags(p_score, masks_required=False)

    p_select = sub.add_parser("select", help="cluster scores and select representatives")
    add_pipeline_flags(p_select, masks_required=False)

    p_prompts = sub.add_parser("prompts", help="derive prompts for selected frames")
    p_prompts.add_argument(
        "prompt_strategy", choices=PROMPT_STRATEGIES, help="prompt strategy"
    )
    add_pipeline_flags(p_prompts, masks_required=True)

    p_eval = sub.add_parser("eval", help="Dice/IoU of predictions vs ground truth")
    p_eval.add_argument("pred_dir", help="directory of predicted masks")
    p_eval.add_argument("gt_dir", help="directory of ground-truth masks")
    p_eval.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p_eval.add_argument("--out", required=True, help="output directory")
    return parser


def _parse_weights(text: str) -> WeightConfig:
    parts = text.split(",")
    if len(parts) != 5:
        raise ValueError(f"--weights needs 5 comma-separated values, got {len(parts)}")
    return WeightConfig(*(float(p) for p in parts))


def _active_frames(dataset: Dataset, split: str) -> tuple[FrameRecord, ...]:
    if split == "all":
        return dataset.frames
    train, val = split_ids(dataset.frame_ids, DEFAULT_SPLIT_RATIO, DEFAULT_SPLIT_SEED)
    keep = set(train if split == "train" else val)
    return tuple(f for f in dataset.frames if f.frame_id in keep)


def _validate(args: argparse.Namespace) -> RunConfig:
    problems: list[str] = []

    weights = WeightConfig()
    try:
        weights = _parse_weights(args.weights)
    except ValueError as exc:
        problems.append(str(exc))

    params = FeatureParams()
    try:
        params = FeatureParams(
            canny_low=args.canny_low,
            canny_high=args.canny_high,
            hist_bins_h=args.bins_h,
            hist_bins_s=args.bins_s,
        )
    except ValueError as exc:
        problems.append(str(exc))

    if args.jobs < 1:
        problems.append(f"--jobs must be >= 1, got {args.jobs}")

    frames: tuple[FrameRecord, ...] = ()
    reference = args.reference or ""
    try:
        dataset = ingest(args.input, args.masks)
        frames = _active_frames(dataset, args.split)
        if not frames:
            problems.append(f"split {args.split!r} selects no frames")
        elif args.reference is None:
            reference = frames[0].frame_id
        elif args.reference not in {f.frame_id for f in frames}:
            problems.append(
                f"reference frame {args.reference!r} not in the active frame set"
            )
    except DatasetError as exc:
        problems.append(str(exc))

    # Scoring alone never clusters, so k only matters to select/prompts.
    if frames and args.command != "score" and not 1 <= args.k <= len(frames):
        problems.append(f"--k must be in [1, {len(frames)}], got {args.k}")

    if problems:
        raise _UsageError(problems)
    return RunConfig(
        command=args.command,
        frames=frames,
        reference_id=reference,
        weights=weights,
        params=params,
        k=args.k,
        seed=args.seed,
        strategy=args.strategy,
        normalize=args.normalize_features,
        split=args.split,
        jobs=args.jobs,
        out_dir=Path(args.out),
        prompt_strategy=getattr(args, "prompt_strategy", None),
    )


def _print_header(cfg: RunConfig) -> None:
    w = cfg.weights
    print(
        f"frameselect {cfg.command}"
        f" | frames={len(cfg.frames)} reference={cfg.reference_id}"
        f" strategy={cfg.strategy} k={cfg.k} seed={cfg.seed}"
        f" | weights={w.alpha},{w.beta},{w.gamma},{w.delta},{w.eps_weight}"
        f" canny={cfg.params.canny_low}:{cfg.params.canny_high}"
        f" bins={cfg.params.hist_bins_h}x{cfg.params.hist_bins_s}"
        f" normalize={'on' if cfg.normalize else 'off'}"
        f" split={cfg.split} jobs={cfg.jobs}"
    )


def _sources(cfg: RunConfig) -> list[FrameSource]:
    return [(f.frame_id, partial(load_image, Path(f.image_path))) for f in cfg.frames]


def _run_selection(cfg: RunConfig) -> SelectionManifest:
    return run_strategy(
        _sources(cfg),
        cfg.reference_id,
        cfg.params,
        cfg.weights,
        k=cfg.k,
        seed=cfg.seed,
        strategy=cfg.strategy,
        normalize=cfg.normalize,
        jobs=cfg.jobs,
    )


def cmd_score(cfg: RunConfig) -> int:
    """Feature/score table only: no clustering, rank follows frame order."""
    _print_header(cfg)
    ids, features = extract_feature_table(
        _sources(cfg), cfg.reference_id, cfg.params, cfg.jobs
    )
    scores = score_frames(ids, features, cfg.weights, cfg.reference_id, cfg.normalize)
    manifest = manifest_from_membership(
        ids,
        features,
        scores.scores,
        (),
        cfg.reference_id,
        "score",
        cfg.weights,
        cfg.params,
        cfg.seed,
        normalized=cfg.normalize,
    )
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    save_manifest(manifest, cfg.out_dir / "manifest.json")
    export_scores_csv(manifest, cfg.out_dir / "scores.csv")
    print(f"wrote {cfg.out_dir / 'manifest.json'} and {cfg.out_dir / 'scores.csv'}")
    return EXIT_OK


def cmd_select(cfg: RunConfig) -> int:
    _print_header(cfg)
    manifest = _run_selection(cfg)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    save_manifest(manifest, cfg.out_dir / "manifest.json")
    export_scores_csv(manifest, cfg.out_dir / "scores.csv")
    print(f"representatives: {', '.join(manifest.representatives)}")
    print(f"wrote {cfg.out_dir / 'manifest.json'} and {cfg.out_dir / 'scores.csv'}")
    return EXIT_OK


def cmd_prompts(cfg: RunConfig) -> int:
    """Prompts for the selected representatives (the frames a reviewer
    would annotate). Frames without a usable mask are skipped and listed;
    the command fails only when every frame fails."""
    _print_header(cfg)
    manifest = _run_selection(cfg)
    masks = {f.frame_id: f.mask_path for f in cfg.frames}
    prompts = []
    failures: list[str] = []
    for fid in manifest.representatives:
        mask_path = masks.get(fid)
        if mask_path is None:
            failures.append(f"{fid}: no mask")
            continue
        try:
            mask = load_mask(Path(mask_path))
            spec = derive_prompts(mask, cfg.prompt_strategy, cfg.seed, frame_id=fid)
        except (RasterError, PromptError) as exc:
            failures.append(f"{fid}: {exc}")
            continue
        prompts.append(spec.to_payload())
    for line in failures:
        print(f"skipped {line}", file=sys.stderr)
    if not prompts:
        print("error: no prompts could be derived", file=sys.stderr)
        return EXIT_RUNTIME
    doc = {
        "version": 1,
        "strategy": cfg.prompt_strategy,
        "seed": cfg.seed,
        "prompts": prompts,
    }
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    path = cfg.out_dir / "prompts.json"
    path.write_text(
        json.dumps(doc, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    print(f"wrote {path} ({len(prompts)} frame(s), {len(failures)} skipped)")
    return EXIT_OK


def _write_eval(report: EvalReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "eval.json").write_text(
        json.dumps(report.to_payload(), ensure_ascii=False, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    lines = ["frame_id,dice,iou"]
    lines += [f"{f.frame_id},{f.dice!r},{f.iou!r}" for f in report.frames]
    (out_dir / "eval.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_eval(args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise _UsageError([f"--jobs must be >= 1, got {args.jobs}"])
    report = evaluate_masks(args.pred_dir, args.gt_dir, jobs=args.jobs)
    out_dir = Path(args.out)
    _write_eval(report, out_dir)
    for stem in report.skipped:
        print(f"skipped {stem}: missing prediction or ground truth", file=sys.stderr)
    print(
        f"frameselect eval | frames={report.frame_count}"
        f" mean_dice={report.mean_dice:.6f} mean_iou={report.mean_iou:.6f}"
    )
    print(f"wrote {out_dir / 'eval.json'} and {out_dir / 'eval.csv'}")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "eval":
            return cmd_eval(args)
        cfg = _validate(args)
        if args.command == "score":
            return cmd_score(cfg)
        if args.command == "select":
            return cmd_select(cfg)
        return cmd_prompts(cfg)
    except _UsageError as exc:
        print("configuration error:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_USAGE
    except _RUNTIME_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
