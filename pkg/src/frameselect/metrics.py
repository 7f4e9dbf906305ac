"""Dice and IoU scoring of predicted masks against ground truth.

Masks are boolean arrays of equal shape. The empty-vs-empty case scores
1.0 for both metrics (perfect agreement on "nothing present"), a standard
convention that keeps batch means defined on frames without findings.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .raster import IMAGE_SUFFIXES, load_mask, validate_mask


class MetricsError(ValueError):
    """Raised for unevaluable inputs (shape mismatch, no pairs, ...)."""


@dataclass(frozen=True)
class FrameScore:
    frame_id: str
    dice: float
    iou: float


@dataclass(frozen=True)
class EvalReport:
    """Per-frame scores plus aggregate means over the evaluated frames.

    ``skipped`` lists filename stems present in only one of the two
    directories; they are excluded from the aggregates.
    """

    frames: tuple[FrameScore, ...]
    mean_dice: float
    mean_iou: float
    skipped: tuple[str, ...] = ()

    @property
    def frame_count(self) -> int:
        return len(self.frames)

    def to_payload(self) -> dict:
        return {
            "version": 1,
            "frame_count": self.frame_count,
            "mean_dice": self.mean_dice,
            "mean_iou": self.mean_iou,
            "skipped": list(self.skipped),
            "frames": [
                {"frame_id": f.frame_id, "dice": f.dice, "iou": f.iou}
                for f in self.frames
            ],
        }


def _overlap_counts(a: np.ndarray, b: np.ndarray) -> tuple[int, int, int]:
    validate_mask(a)
    validate_mask(b)
    if a.shape != b.shape:
        raise MetricsError(f"mask shapes differ: {a.shape} vs {b.shape}")
    inter = int(np.count_nonzero(a & b))
    return inter, int(np.count_nonzero(a)), int(np.count_nonzero(b))


def dice_coefficient(a: np.ndarray, b: np.ndarray) -> float:
    """2|a∩b| / (|a|+|b|), or 1.0 when both masks are empty."""
    inter, na, nb = _overlap_counts(a, b)
    if na + nb == 0:
        return 1.0
    return 2.0 * inter / (na + nb)


def iou_score(a: np.ndarray, b: np.ndarray) -> float:
    """|a∩b| / |a∪b|, or 1.0 when both masks are empty."""
    inter, na, nb = _overlap_counts(a, b)
    union = na + nb - inter
    if union == 0:
        return 1.0
    return inter / union


def _mask_files(directory: Path) -> dict[str, Path]:
    files: dict[str, Path] = {}
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in IMAGE_SUFFIXES or not path.is_file():
            continue
        if path.stem in files:
            raise MetricsError(f"duplicate mask stem {path.stem!r} in {directory}")
        files[path.stem] = path
    return files


def evaluate_masks(pred_dir: Path | str, gt_dir: Path | str, jobs: int = 1) -> EvalReport:
    """Score every prediction against the ground truth sharing its stem.

    Stems present in only one directory are skipped and reported; an empty
    intersection is an error. Pairs may be scored in parallel; results are
    assembled in sorted stem order, so the report is deterministic.
    """
    pred_dir = Path(pred_dir)
    gt_dir = Path(gt_dir)
    preds = _mask_files(pred_dir)
    gts = _mask_files(gt_dir)
    common = sorted(set(preds) & set(gts))
    skipped = tuple(sorted(set(preds) ^ set(gts)))
    if not common:
        raise MetricsError(
            f"no prediction/ground-truth pairs between {pred_dir} and {gt_dir}"
        )

    def one(stem: str) -> FrameScore:
        pred = load_mask(preds[stem])
        gt = load_mask(gts[stem])
        return FrameScore(stem, dice_coefficient(pred, gt), iou_score(pred, gt))

    if jobs <= 1:
        frames = tuple(one(stem) for stem in common)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            frames = tuple(pool.map(one, common))
    mean_dice = sum(f.dice for f in frames) / len(frames)
    mean_iou = sum(f.iou for f in frames) / len(frames)
    return EvalReport(frames=frames, mean_dice=mean_dice, mean_iou=mean_iou, skipped=skipped)
