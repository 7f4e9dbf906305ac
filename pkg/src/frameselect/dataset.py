"""Dataset ingestion, deterministic train/validation split, persistence.

A dataset manifest lists frames in lexicographic filename order (the only
portable stable order) with optional per-frame masks paired by filename
stem. A selection manifest records one selection run: reference, weights,
feature parameters, per-frame scores, cluster membership, and ranking.
Both are serialized as versioned UTF-8 JSON; fields unknown to this
version survive a load/save round trip untouched.

The train/validation split shuffles the sorted id list with the pinned
splitmix64 generator and takes the first ceil(ratio * N) ids as training,
so a (ids, ratio, seed) triple always yields the same split.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .features import FeatureParams
from .raster import IMAGE_SUFFIXES
from .rng import SplitMix64
from .selection import AfseResult, FeatureVector, WeightConfig

MANIFEST_VERSION = 1
DEFAULT_SPLIT_RATIO = 0.7
DEFAULT_SPLIT_SEED = 2024

SCORE_CSV_HEADER = ("id", "B", "C", "E", "H", "S", "F", "cluster", "distance", "rank")


class DatasetError(ValueError):
    """Raised for unreadable datasets and malformed or mismatched manifests."""


@dataclass(frozen=True)
class FrameRecord:
    """One frame: id (filename stem), image path, optional mask path."""

    frame_id: str
    image_path: str
    mask_path: Optional[str] = None


@dataclass(frozen=True)
class Dataset:
    """An ordered frame list plus an optional train/validation split."""

    frames: tuple[FrameRecord, ...]
    modality: str = ""
    train_ids: tuple[str, ...] = ()
    val_ids: tuple[str, ...] = ()
    split_seed: Optional[int] = None
    split_ratio: Optional[float] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        ids = [f.frame_id for f in self.frames]
        if len(set(ids)) != len(ids):
            raise DatasetError("frame ids must be unique")
        if self.split_ratio is None:
            if self.train_ids or self.val_ids:
                raise DatasetError("split ids present without split parameters")
            return
        if not 0 < self.split_ratio < 1:
            raise DatasetError(f"split ratio must be in (0, 1), got {self.split_ratio}")
        train, val = set(self.train_ids), set(self.val_ids)
        if train & val:
            raise DatasetError("train and validation ids overlap")
        if train | val != set(ids):
            raise DatasetError("split does not cover exactly the dataset ids")
        if len(self.train_ids) != train_size(len(ids), self.split_ratio):
            raise DatasetError("train size does not match ceil(ratio * N)")

    @property
    def frame_ids(self) -> tuple[str, ...]:
        return tuple(f.frame_id for f in self.frames)

    def to_payload(self) -> dict:
        payload = dict(self.extra)
        payload.update(
            {
                "version": MANIFEST_VERSION,
                "kind": "dataset",
                "modality": self.modality,
                "frames": [
                    {
                        "id": f.frame_id,
                        "image_path": f.image_path,
                        "mask_path": f.mask_path,
                    }
                    for f in self.frames
                ],
                "split": None
                if self.split_ratio is None
                else {
                    "train": list(self.train_ids),
                    "val": list(self.val_ids),
                    "seed": self.split_seed,
                    "ratio": self.split_ratio,
                },
            }
        )
        return payload


@dataclass(frozen=True)
class FrameScoreRow:
    """Scores and selection state of one frame in a selection manifest."""

    frame_id: str
    brightness: float
    contrast: float
    edge_density: float
    color_similarity: float
    shape_similarity: float
    composite: float
    cluster: Optional[int]
    distance: Optional[float]
    is_representative: bool
    rank: Optional[int]


@dataclass(frozen=True)
class SelectionManifest:
    """A recorded selection run.

    Exactly k rows are flagged representative, and the ranks of the
    remaining rows form a permutation of 1..(N-k); both are enforced on
    construction (and therefore on load).
    """

    reference_id: str
    strategy: str
    k: int
    seed: int
    weights: WeightConfig
    params: FeatureParams
    rows: tuple[FrameScoreRow, ...]
    normalized: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        ids = [r.frame_id for r in self.rows]
        if len(set(ids)) != len(ids):
            raise DatasetError("duplicate frame ids in selection manifest")
        reps = [r for r in self.rows if r.is_representative]
        if len(reps) != self.k:
            raise DatasetError(
                f"expected {self.k} representatives, found {len(reps)}"
            )
        ranks = sorted(r.rank for r in self.rows if not r.is_representative)
        expected = list(range(1, len(self.rows) - self.k + 1))
        if ranks != expected:
            raise DatasetError("ranks must be a permutation of 1..(N-k)")

    @property
    def representatives(self) -> tuple[str, ...]:
        return tuple(r.frame_id for r in self.rows if r.is_representative)

    def to_payload(self) -> dict:
        payload = dict(self.extra)
        payload.update(
            {
                "version": MANIFEST_VERSION,
                "kind": "selection",
                "reference_id": self.reference_id,
                "strategy": self.strategy,
                "k": self.k,
                "seed": self.seed,
                "normalize_features": self.normalized,
                "weights": {
                    "alpha": self.weights.alpha,
                    "beta": self.weights.beta,
                    "gamma": self.weights.gamma,
                    "delta": self.weights.delta,
                    "epsilon": self.weights.eps_weight,
                },
                "feature_params": {
                    "canny_low": self.params.canny_low,
                    "canny_high": self.params.canny_high,
                    "gaussian_sigma": self.params.gaussian_sigma,
                    "hist_bins_h": self.params.hist_bins_h,
                    "hist_bins_s": self.params.hist_bins_s,
                    "hu_epsilon": self.params.hu_epsilon,
                },
                "frames": [
                    {
                        "id": r.frame_id,
                        "B": r.brightness,
                        "C": r.contrast,
                        "E": r.edge_density,
                        "H": r.color_similarity,
                        "S": r.shape_similarity,
                        "F": r.composite,
                        "cluster": r.cluster,
                        "distance": r.distance,
                        "is_representative": r.is_representative,
                        "rank": r.rank,
                    }
                    for r in self.rows
                ],
            }
        )
        return payload


Manifest = Union[Dataset, SelectionManifest]


def train_size(n: int, ratio: float) -> int:
    """ceil(ratio * n) in exact arithmetic, immune to float rounding."""
    return math.ceil(Fraction(ratio) * n)


def _scan_images(directory: Path, what: str) -> dict[str, Path]:
    if not directory.is_dir():
        raise DatasetError(f"{what} directory {directory} does not exist")
    found: dict[str, Path] = {}
    for path in sorted(directory.iterdir(), key=lambda p: p.name):
        if not path.is_file() or path.suffix.lower() not in IMAGE_SUFFIXES:
            continue
        if path.stem in found:
            raise DatasetError(f"duplicate {what} stem {path.stem!r} in {directory}")
        found[path.stem] = path
    return found


def ingest(
    image_dir: Path | str, mask_dir: Path | str | None = None, modality: str = ""
) -> Dataset:
    """Build a dataset from an image directory and an optional mask directory.

    Frames are ordered lexicographically by filename; masks pair with
    images by filename stem. Masks without a matching image are skipped
    with a warning.
    """
    images = _scan_images(Path(image_dir), "image")
    if not images:
        raise DatasetError(f"no supported images in {image_dir}")
    masks = _scan_images(Path(mask_dir), "mask") if mask_dir is not None else {}
    unmatched = sorted(set(masks) - set(images))
    if unmatched:
        warnings.warn(
            f"{len(unmatched)} mask(s) have no matching image: {', '.join(unmatched)}",
            stacklevel=2,
        )
    frames = tuple(
        FrameRecord(
            frame_id=stem,
            image_path=str(path),
            mask_path=str(masks[stem]) if stem in masks else None,
        )
        for stem, path in sorted(images.items(), key=lambda kv: kv[1].name)
    )
    return Dataset(frames=frames, modality=modality)


def split_ids(
    ids: tuple[str, ...] | list[str],
    ratio: float = DEFAULT_SPLIT_RATIO,
    seed: int = DEFAULT_SPLIT_SEED,
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Shuffle the sorted ids with the seeded generator; first ceil(ratio*N)
    become the training set, the rest validation."""
    if not 0 < ratio < 1:
        raise DatasetError(f"split ratio must be in (0, 1), got {ratio}")
    pool = sorted(ids)
    SplitMix64(seed).shuffle(pool)
    cut = train_size(len(pool), ratio)
    return tuple(pool[:cut]), tuple(pool[cut:])


def split_dataset(
    dataset: Dataset,
    ratio: float = DEFAULT_SPLIT_RATIO,
    seed: int = DEFAULT_SPLIT_SEED,
) -> Dataset:
    """Return a copy of the dataset with the split fields populated."""
    train, val = split_ids(dataset.frame_ids, ratio, seed)
    return replace(
        dataset, train_ids=train, val_ids=val, split_seed=seed, split_ratio=ratio
    )


def save_manifest(manifest: Manifest, path: Path | str) -> None:
    """Write a manifest as deterministic UTF-8 JSON (sorted keys)."""
    text = json.dumps(manifest.to_payload(), ensure_ascii=False, sort_keys=True, indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_manifest(path: Path | str) -> Manifest:
    """Load a dataset or selection manifest, preserving unknown fields."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise DatasetError(f"cannot read manifest {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise DatasetError("manifest must be a JSON object")
    version = _require(doc, "version")
    if version != MANIFEST_VERSION:
        raise DatasetError(
            f"unsupported manifest version {version!r} (expected {MANIFEST_VERSION})"
        )
    kind = _require(doc, "kind")
    if kind == "dataset":
        return _dataset_from(doc)
    if kind == "selection":
        return _selection_from(doc)
    raise DatasetError(f"unknown manifest kind {kind!r}")


def _require(doc: dict, key: str):
    if key not in doc:
        raise DatasetError(f"manifest missing required field {key!r}")
    return doc[key]


_DATASET_KEYS = frozenset({"version", "kind", "modality", "frames", "split"})
_SELECTION_KEYS = frozenset(
    {
        "version",
        "kind",
        "reference_id",
        "strategy",
        "k",
        "seed",
        "normalize_features",
        "weights",
        "feature_params",
        "frames",
    }
)


def _dataset_from(doc: dict) -> Dataset:
    frames = tuple(
        FrameRecord(
            frame_id=_require(entry, "id"),
            image_path=_require(entry, "image_path"),
            mask_path=entry.get("mask_path"),
        )
        for entry in _require(doc, "frames")
    )
    split = doc.get("split")
    extra = {k: v for k, v in doc.items() if k not in _DATASET_KEYS}
    if split is None:
        return Dataset(frames=frames, modality=doc.get("modality", ""), extra=extra)
    return Dataset(
        frames=frames,
        modality=doc.get("modality", ""),
        train_ids=tuple(_require(split, "train")),
        val_ids=tuple(_require(split, "val")),
        split_seed=_require(split, "seed"),
        split_ratio=_require(split, "ratio"),
        extra=extra,
    )


def _selection_from(doc: dict) -> SelectionManifest:
    w = _require(doc, "weights")
    p = _require(doc, "feature_params")
    rows = tuple(
        FrameScoreRow(
            frame_id=_require(entry, "id"),
            brightness=_require(entry, "B"),
            contrast=_require(entry, "C"),
            edge_density=_require(entry, "E"),
            color_similarity=_require(entry, "H"),
            shape_similarity=_require(entry, "S"),
            composite=_require(entry, "F"),
            cluster=entry.get("cluster"),
            distance=entry.get("distance"),
            is_representative=_require(entry, "is_representative"),
            rank=entry.get("rank"),
        )
        for entry in _require(doc, "frames")
    )
    return SelectionManifest(
        reference_id=_require(doc, "reference_id"),
        strategy=_require(doc, "strategy"),
        k=_require(doc, "k"),
        seed=_require(doc, "seed"),
        weights=WeightConfig(
            alpha=_require(w, "alpha"),
            beta=_require(w, "beta"),
            gamma=_require(w, "gamma"),
            delta=_require(w, "delta"),
            eps_weight=_require(w, "epsilon"),
        ),
        params=FeatureParams(
            canny_low=_require(p, "canny_low"),
            canny_high=_require(p, "canny_high"),
            gaussian_sigma=_require(p, "gaussian_sigma"),
            hist_bins_h=_require(p, "hist_bins_h"),
            hist_bins_s=_require(p, "hist_bins_s"),
            hu_epsilon=_require(p, "hu_epsilon"),
        ),
        rows=rows,
        normalized=doc.get("normalize_features", False),
        extra={k: v for k, v in doc.items() if k not in _SELECTION_KEYS},
    )


def manifest_from_afse(
    result: AfseResult,
    strategy: str,
    weights: WeightConfig,
    params: FeatureParams,
    seed: int,
) -> SelectionManifest:
    """Selection manifest for a clustering run (cluster, distance, rank
    taken from the fitted model and proximity ranking)."""
    rep_set = set(result.selection.representatives)
    rank_of = {fid: i + 1 for i, fid in enumerate(result.selection.ranking)}
    rows = []
    for i, fid in enumerate(result.frame_ids):
        fv = result.features[i]
        rows.append(
            FrameScoreRow(
                frame_id=fid,
                brightness=fv.brightness,
                contrast=fv.contrast,
                edge_density=fv.edge_density,
                color_similarity=fv.color_similarity,
                shape_similarity=fv.shape_similarity,
                composite=result.scores.scores[i],
                cluster=int(result.model.assignment[i]),
                distance=float(result.model.distances[i]),
                is_representative=fid in rep_set,
                rank=rank_of.get(fid),
            )
        )
    return SelectionManifest(
        reference_id=result.scores.reference_id,
        strategy=strategy,
        k=result.model.k,
        seed=seed,
        weights=weights,
        params=params,
        rows=tuple(rows),
        normalized=result.normalized,
    )


def manifest_from_membership(
    frame_ids: tuple[str, ...],
    features: tuple[FeatureVector, ...],
    scores: tuple[float, ...],
    representatives: tuple[str, ...],
    reference_id: str,
    strategy: str,
    weights: WeightConfig,
    params: FeatureParams,
    seed: int,
    normalized: bool = False,
) -> SelectionManifest:
    """Selection manifest for a non-clustering strategy: no cluster or
    distance, non-representatives ranked 1..(N-k) in frame order."""
    rep_set = set(representatives)
    rows = []
    rank = 0
    for fid, fv, score in zip(frame_ids, features, scores):
        is_rep = fid in rep_set
        if not is_rep:
            rank += 1
        rows.append(
            FrameScoreRow(
                frame_id=fid,
                brightness=fv.brightness,
                contrast=fv.contrast,
                edge_density=fv.edge_density,
                color_similarity=fv.color_similarity,
                shape_similarity=fv.shape_similarity,
                composite=score,
                cluster=None,
                distance=None,
                is_representative=is_rep,
                rank=None if is_rep else rank,
            )
        )
    return SelectionManifest(
        reference_id=reference_id,
        strategy=strategy,
        k=len(rep_set),
        seed=seed,
        weights=weights,
        params=params,
        rows=tuple(rows),
        normalized=normalized,
    )


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_scores_csv(manifest: SelectionManifest, path: Path | str) -> None:
    """Per-frame score table as CSV with the id,B,C,E,H,S,F,cluster,
    distance,rank header; floats keep full precision."""
    lines = [",".join(SCORE_CSV_HEADER)]
    for r in manifest.rows:
        lines.append(
            ",".join(
                _csv_cell(v)
                for v in (
                    r.frame_id,
                    r.brightness,
                    r.contrast,
                    r.edge_density,
                    r.color_similarity,
                    r.shape_similarity,
                    r.composite,
                    r.cluster,
                    r.distance,
                    r.rank,
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
