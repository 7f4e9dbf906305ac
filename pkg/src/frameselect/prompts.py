"""Point and box prompt derivation from ground-truth masks.

Produces the prompt configurations used to drive an external promptable
segmentation backend: a single interior point, randomly sampled positive
and negative points in several count combinations, and a tight bounding
box. Coordinates are integer pixels with origin at the top-left, points
are (x, y), boxes are inclusive (xmin, ymin, xmax, ymax).

Positional prompts target the largest 8-connected foreground component,
so multi-instance masks behave like single-object prompting; the bounding
box spans all foreground. Negative points are kept at least 5 px
(chessboard) away from the mask so they are unambiguous background, with
a fallback to any background pixel when the margin leaves nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .raster import validate_mask
from .rng import SplitMix64

POSITIVE = 1
NEGATIVE = 0

NEGATIVE_MARGIN_PX = 5

STRATEGY_STANDARD_POS = "StandardPos"
STRATEGY_RANDOM_POS = "RandomPos"
STRATEGY_SINGLE_NEG = "SingleNeg"
STRATEGY_SINGLE_POS_NEG = "SinglePosNeg"
STRATEGY_FOUR_POS = "FourPos"
STRATEGY_FOUR_NEG = "FourNeg"
STRATEGY_SINGLE_POS_TWO_NEG = "SinglePosTwoNeg"
STRATEGY_TWO_POS_FOUR_NEG = "TwoPosFourNeg"
STRATEGY_BBOX = "BBox"

PROMPT_STRATEGIES = (
    STRATEGY_STANDARD_POS,
    STRATEGY_RANDOM_POS,
    STRATEGY_SINGLE_NEG,
    STRATEGY_SINGLE_POS_NEG,
    STRATEGY_FOUR_POS,
    STRATEGY_FOUR_NEG,
    STRATEGY_SINGLE_POS_TWO_NEG,
    STRATEGY_TWO_POS_FOUR_NEG,
    STRATEGY_BBOX,
)

# (sampled positives, negatives, leading interior point) per strategy;
# BBox is dispatched separately.
_POINT_PLANS: dict[str, tuple[int, int, bool]] = {
    STRATEGY_STANDARD_POS: (0, 0, True),
    STRATEGY_RANDOM_POS: (1, 0, False),
    STRATEGY_SINGLE_NEG: (0, 1, False),
    STRATEGY_SINGLE_POS_NEG: (0, 1, True),
    STRATEGY_FOUR_POS: (4, 0, False),
    STRATEGY_FOUR_NEG: (0, 4, False),
    STRATEGY_SINGLE_POS_TWO_NEG: (0, 2, True),
    STRATEGY_TWO_POS_FOUR_NEG: (2, 4, False),
}


class PromptError(ValueError):
    """Raised when a prompt cannot be derived from the given mask."""


@dataclass(frozen=True)
class PromptPoint:
    """A point prompt: pixel coordinates plus a 1 (positive) / 0 (negative)
    label, matching the wire convention of promptable segmenters."""

    x: int
    y: int
    label: int

    def __post_init__(self) -> None:
        if self.label not in (POSITIVE, NEGATIVE):
            raise ValueError(f"label must be {POSITIVE} or {NEGATIVE}, got {self.label}")


@dataclass(frozen=True)
class PromptSpec:
    """Prompts for one frame: points, or a box for the BBox strategy."""

    frame_id: str
    strategy: str
    points: tuple[PromptPoint, ...]
    bbox: Optional[tuple[int, int, int, int]] = None

    def __post_init__(self) -> None:
        if self.strategy not in PROMPT_STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == STRATEGY_BBOX:
            if self.bbox is None or self.points:
                raise ValueError("BBox prompts carry a box and no points")
        elif self.bbox is not None:
            raise ValueError("point strategies carry no box")

    def to_payload(self) -> dict:
        """JSON-ready form: {frame_id, points: [{x, y, label}], bbox}."""
        return {
            "frame_id": self.frame_id,
            "points": [{"x": p.x, "y": p.y, "label": p.label} for p in self.points],
            "bbox": list(self.bbox) if self.bbox is not None else None,
        }


def derive_bbox(mask: np.ndarray) -> tuple[int, int, int, int]:
    """Tight inclusive (xmin, ymin, xmax, ymax) over all foreground pixels."""
    validate_mask(mask)
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        raise PromptError("cannot derive a bbox from an empty mask")
    return (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def largest_component(mask: np.ndarray) -> np.ndarray:
    """Boolean mask of the largest 8-connected foreground component.

    Size ties go to the component whose first pixel comes earliest in
    raster order.
    """
    validate_mask(mask)
    if not mask.any():
        raise PromptError("mask has no foreground component")
    labels, count = ndimage.label(mask, structure=np.ones((3, 3), dtype=bool))
    sizes = np.bincount(labels.ravel())[1:]
    best_size = sizes.max()
    tied = [lab for lab in range(1, count + 1) if sizes[lab - 1] == best_size]
    if len(tied) > 1:
        flat = labels.ravel()
        tied.sort(key=lambda lab: int(np.flatnonzero(flat == lab)[0]))
    return labels == tied[0]


def interior_depth(component: np.ndarray) -> np.ndarray:
    """L1 distance to background per foreground pixel, border counted as
    background (so the map is finite even for a full-frame component)."""
    padded = np.pad(component, 1)
    dist = ndimage.distance_transform_cdt(padded, metric="taxicab")
    return np.asarray(dist[1:-1, 1:-1], dtype=np.int64)


def standard_pos_point(mask: np.ndarray) -> tuple[int, int]:
    """The most interior foreground pixel of the largest component.

    Argmax of the L1 distance transform; ties resolve to the lowest
    (y, x). Returns (x, y).
    """
    component = largest_component(mask)
    depth = interior_depth(component)
    flat = int(np.argmax(depth))  # first max in raster order = lowest (y, x)
    y, x = divmod(flat, mask.shape[1])
    return (x, y)


def _background_margin(mask: np.ndarray) -> np.ndarray:
    """Chessboard distance from each background pixel to the mask (0 on the
    mask itself); all-background masks yield an unbounded margin."""
    if not mask.any():
        return np.full(mask.shape, np.iinfo(np.int32).max, dtype=np.int64)
    dist = ndimage.distance_transform_cdt(~mask, metric="chessboard")
    return np.asarray(dist, dtype=np.int64)


def _draw(region: np.ndarray, m: int, rng: SplitMix64, what: str) -> list[tuple[int, int]]:
    """m distinct pixels from the region, uniform via shuffle-and-take."""
    flat_idx = np.flatnonzero(region.ravel()).tolist()
    if len(flat_idx) < m:
        raise PromptError(
            f"need {m} {what} pixels but only {len(flat_idx)} are available"
        )
    rng.shuffle(flat_idx)
    width = region.shape[1]
    return [(idx % width, idx // width) for idx in flat_idx[:m]]


def sample_points(
    mask: np.ndarray, n_pos: int, n_neg: int, seed: int
) -> tuple[PromptPoint, ...]:
    """Sample point prompts from a mask, deterministically for a seed.

    Positives are drawn uniformly without replacement from the largest
    foreground component; negatives from background pixels at chessboard
    distance >= 5 px from the mask, falling back to any background pixel
    when no pixel clears the margin. Positives are drawn first, then
    negatives, from a single seeded stream.
    """
    validate_mask(mask)
    if n_pos < 0 or n_neg < 0:
        raise PromptError("point counts must be non-negative")
    rng = SplitMix64(seed)
    points: list[PromptPoint] = []
    if n_pos > 0:
        region = largest_component(mask)
        for x, y in _draw(region, n_pos, rng, "foreground"):
            points.append(PromptPoint(x, y, POSITIVE))
    if n_neg > 0:
        margin = _background_margin(mask)
        region = margin >= NEGATIVE_MARGIN_PX
        if not region.any():
            region = ~mask
        for x, y in _draw(region, n_neg, rng, "background"):
            points.append(PromptPoint(x, y, NEGATIVE))
    return tuple(points)


def derive_prompts(
    mask: np.ndarray, strategy: str, seed: int, frame_id: str = ""
) -> PromptSpec:
    """Derive the prompt set a strategy name calls for.

    Strategies with a single positive point use the interior point; the
    multi-positive strategies sample their positives. BBox derives a box
    and no points.
    """
    if strategy == STRATEGY_BBOX:
        return PromptSpec(
            frame_id=frame_id, strategy=strategy, points=(), bbox=derive_bbox(mask)
        )
    if strategy not in _POINT_PLANS:
        raise PromptError(f"unknown strategy {strategy!r}")
    n_pos, n_neg, interior = _POINT_PLANS[strategy]
    points: list[PromptPoint] = []
    if interior:
        x, y = standard_pos_point(mask)
        points.append(PromptPoint(x, y, POSITIVE))
    points.extend(sample_points(mask, n_pos, n_neg, seed))
    return PromptSpec(frame_id=frame_id, strategy=strategy, points=tuple(points))
