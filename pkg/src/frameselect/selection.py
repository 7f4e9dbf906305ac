"""Composite scoring, score clustering, and representative-frame selection.

The main pipeline (`run_afse`) scores every frame against a clinician-chosen
reference frame, clusters the scalar composite scores with k-means, picks
the frame nearest each centroid as that cluster's representative, and ranks
the remaining frames by centroid proximity. Three baseline strategies are
provided for comparison: seeded random choice, evenly spaced choice, and an
ablated variant that clusters an unweighted feature mean instead of the
weighted composite score.

Everything here is deterministic for a fixed (inputs, seed): the k-means++
seeding and all shuffles run on the pinned splitmix64 generator, and all
tie-breaks go to the lowest frame index.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .features import (
    FeatureParams,
    FeatureVector,
    build_reference_profile,
    extract_features,
)
from .rng import SplitMix64

# A frame is an id paired with either a decoded raster or a zero-argument
# loader, so long sequences can be scored without holding every image.
RasterSource = Union[np.ndarray, Callable[[], np.ndarray]]
FrameSource = tuple[str, RasterSource]

KMEANS_MAX_ITER = 100
KMEANS_REL_TOL = 1e-6
# Seeded k-means++ draws per fit; split seeds are added in the 1-D case.
KMEANS_RESTARTS = 4
# Enumerate every contiguous split as an init while C(n-1, k-1) stays below
# this; beyond it only the DP-optimal split is seeded.
_SPLIT_ENUM_CAP = 64

STRATEGY_AFSE = "afse"
STRATEGY_RANDOM = "random"
STRATEGY_UNIFORM = "uniform"
STRATEGY_AFSE_WO_SCORER = "afse-wo-scorer"
SELECTION_STRATEGIES = (
    STRATEGY_AFSE,
    STRATEGY_RANDOM,
    STRATEGY_UNIFORM,
    STRATEGY_AFSE_WO_SCORER,
)


class SelectionError(ValueError):
    """Raised for invalid selection inputs (bad k, unknown reference, ...)."""


@dataclass(frozen=True)
class WeightConfig:
    """Weights of the five feature scores in the composite score."""

    alpha: float = 0.2
    beta: float = 0.2
    gamma: float = 0.2
    delta: float = 0.2
    eps_weight: float = 0.2

    def __post_init__(self) -> None:
        values = self.as_tuple()
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"weights must be finite, got {values}")
        if all(v == 0 for v in values):
            raise ValueError("at least one weight must be nonzero")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta, self.eps_weight)

    def scaled(self, factor: float) -> "WeightConfig":
        return WeightConfig(*(factor * v for v in self.as_tuple()))


@dataclass(frozen=True)
class ScoreSet:
    """Composite scores for an ordered set of frames."""

    frame_ids: tuple[str, ...]
    scores: tuple[float, ...]
    reference_id: str

    def __post_init__(self) -> None:
        if len(self.frame_ids) != len(self.scores):
            raise ValueError("frame_ids and scores must have equal length")
        if len(set(self.frame_ids)) != len(self.frame_ids):
            raise ValueError("frame ids must be unique")
        if self.reference_id not in self.frame_ids:
            raise ValueError(f"reference {self.reference_id!r} not among frames")
        if not all(math.isfinite(s) for s in self.scores):
            raise ValueError("scores must be finite")

    def __len__(self) -> int:
        return len(self.frame_ids)


@dataclass(frozen=True)
class ClusterModel:
    """Fitted k-means state over the per-frame scores.

    ``objective_history`` holds the objective after every Lloyd iteration;
    it is non-increasing. ``distances`` are per-frame distances to the
    assigned centroid, aligned with the score set's frame order.
    """

    k: int
    centroids: np.ndarray
    assignment: np.ndarray
    objective: float
    objective_history: tuple[float, ...]
    distances: np.ndarray


@dataclass(frozen=True)
class SelectionResult:
    """Representatives (one per cluster) plus the proximity ranking."""

    representatives: tuple[str, ...]
    ranking: tuple[str, ...]
    distances: dict[str, float]


@dataclass(frozen=True)
class AfseResult:
    """Full pipeline output: features, scores, cluster model, selection."""

    frame_ids: tuple[str, ...]
    features: tuple[FeatureVector, ...]
    scores: ScoreSet
    model: ClusterModel
    selection: SelectionResult
    normalized: bool = False


def composite_score(fv: FeatureVector, w: WeightConfig) -> float:
    """Weighted sum of the five feature scores (evaluated left to right)."""
    return (
        w.alpha * fv.brightness
        + w.beta * fv.contrast
        + w.gamma * fv.edge_density
        + w.delta * fv.color_similarity
        + w.eps_weight * fv.shape_similarity
    )


def _materialize(source: RasterSource) -> np.ndarray:
    return source() if callable(source) else source


def extract_feature_table(
    frames: Sequence[FrameSource],
    reference_id: str,
    params: FeatureParams = FeatureParams(),
    jobs: int = 1,
) -> tuple[tuple[str, ...], tuple[FeatureVector, ...]]:
    """Extract features for every frame relative to the named reference.

    Frames are scored independently (optionally across ``jobs`` workers) and
    assembled by frame index, so the result is order-deterministic. Only one
    raster per in-flight worker is held in memory.
    """
    ids = tuple(fid for fid, _ in frames)
    if len(set(ids)) != len(ids):
        raise SelectionError("frame ids must be unique")
    sources = {fid: src for fid, src in frames}
    if reference_id not in sources:
        raise SelectionError(f"reference frame {reference_id!r} not among frames")
    profile = build_reference_profile(_materialize(sources[reference_id]), params)

    def one(frame: FrameSource) -> FeatureVector:
        return extract_features(_materialize(frame[1]), profile, params)

    if jobs <= 1:
        features = tuple(one(frame) for frame in frames)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            features = tuple(pool.map(one, frames))
    return ids, features


def minmax_normalize(features: Sequence[FeatureVector]) -> tuple[FeatureVector, ...]:
    """Per-feature min-max normalization over the dataset.

    Each of the five features is rescaled to [0, 1] by its dataset-wide
    range; a feature that is constant across the dataset maps to 0.0.
    """
    table = np.array([fv.as_tuple() for fv in features], dtype=np.float64)
    lo = table.min(axis=0)
    hi = table.max(axis=0)
    span = hi - lo
    out = np.zeros_like(table)
    nonflat = span > 0
    out[:, nonflat] = (table[:, nonflat] - lo[nonflat]) / span[nonflat]
    return tuple(FeatureVector(*row) for row in out.tolist())


def score_frames(
    frame_ids: Sequence[str],
    features: Sequence[FeatureVector],
    weights: WeightConfig,
    reference_id: str,
    normalize: bool = False,
) -> ScoreSet:
    fvs = minmax_normalize(features) if normalize else tuple(features)
    scores = tuple(composite_score(fv, weights) for fv in fvs)
    return ScoreSet(frame_ids=tuple(frame_ids), scores=scores, reference_id=reference_id)


def _kmeans_pp_seeds(points: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    """k-means++ seeding: first seed uniform, then D^2-weighted draws.

    If every remaining squared distance is zero (duplicate-heavy data) the
    next seed falls back to a uniform draw.
    """
    n = points.shape[0]
    seeds = np.empty((k,) + points.shape[1:], dtype=np.float64)
    idx = rng.below(n)
    seeds[0] = points[idx]
    d2 = _sqdist(points, seeds[0])
    for i in range(1, k):
        total = float(d2.sum())
        if total > 0.0:
            r = rng.random() * total
            cum = np.cumsum(d2)
            j = min(int(np.searchsorted(cum, r, side="right")), n - 1)
        else:
            j = rng.below(n)
        seeds[i] = points[j]
        d2 = np.minimum(d2, _sqdist(points, seeds[i]))
    return seeds


def _sqdist(points: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = points - center
    if diff.ndim == 1:
        return diff * diff
    return np.sum(diff * diff, axis=1)


def _all_sqdist(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    if points.ndim == 1:
        diff = points[:, None] - centroids[None, :]
        return diff * diff
    diff = points[:, None, :] - centroids[None, :, :]
    return np.sum(diff * diff, axis=2)


def kmeans_fit(scores: ScoreSet, k: int, seed: int) -> ClusterModel:
    """Lloyd's algorithm on the scalar composite scores.

    Each fit refines several initial centroid candidates, seeded k-means++
    draws plus contiguous-split seeds (1-D k-means optima are contiguous in
    sorted order, so these let small instances reach the global optimum
    rather than a local one), and keeps the run with the lowest objective.
    Every run caps at 100 Lloyd iterations and stops when the relative
    objective change drops below 1e-6; an empty cluster is repaired by
    reassigning the point farthest from its centroid (among clusters that
    keep at least one member). Deterministic for a fixed (scores, k, seed).
    """
    points = np.asarray(scores.scores, dtype=np.float64)
    return _lloyd(points, k, seed)


def _split_inits(points: np.ndarray, k: int) -> list[np.ndarray]:
    """Initial centroids from contiguous splits of the sorted values."""
    n = points.shape[0]
    sorted_pts = np.sort(points)
    if math.comb(n - 1, k - 1) <= _SPLIT_ENUM_CAP:
        inits = []
        for cuts in itertools.combinations(range(1, n), k - 1):
            bounds = (0, *cuts, n)
            inits.append(
                np.array([sorted_pts[a:b].mean() for a, b in zip(bounds, bounds[1:])])
            )
        return inits
    return [_dp_split_init(sorted_pts, k)]


def _dp_split_init(sorted_pts: np.ndarray, k: int) -> np.ndarray:
    """Centroids of the minimum-SSE contiguous k-split (prefix-sum DP)."""
    n = sorted_pts.shape[0]
    s1 = np.concatenate(([0.0], np.cumsum(sorted_pts)))
    s2 = np.concatenate(([0.0], np.cumsum(sorted_pts * sorted_pts)))
    cost = np.full((k + 1, n + 1), np.inf)
    cut = np.zeros((k + 1, n + 1), dtype=np.intp)
    cost[0, 0] = 0.0
    for m in range(1, k + 1):
        for j in range(m, n + 1):
            i = np.arange(m - 1, j)
            seg = (s2[j] - s2[i]) - (s1[j] - s1[i]) ** 2 / (j - i)
            total = cost[m - 1, i] + np.maximum(seg, 0.0)
            best = int(np.argmin(total))
            cost[m, j] = total[best]
            cut[m, j] = m - 1 + best
    bounds = [n]
    for m in range(k, 0, -1):
        bounds.append(int(cut[m, bounds[-1]]))
    bounds.reverse()
    return np.array([sorted_pts[a:b].mean() for a, b in zip(bounds, bounds[1:])])


def _lloyd(points: np.ndarray, k: int, seed: int) -> ClusterModel:
    n = points.shape[0]
    if k < 1:
        raise SelectionError(f"k must be >= 1, got {k}")
    if k > n:
        raise SelectionError(f"k = {k} exceeds the number of frames ({n})")

    rng = SplitMix64(seed)
    inits = [_kmeans_pp_seeds(points, k, rng) for _ in range(KMEANS_RESTARTS)]
    if points.ndim == 1 and k >= 2:
        inits.extend(_split_inits(points, k))
    best: ClusterModel | None = None
    for init in inits:
        model = _lloyd_run(points, k, init)
        if best is None or model.objective < best.objective:
            best = model
    return best


def _lloyd_run(points: np.ndarray, k: int, init: np.ndarray) -> ClusterModel:
    n = points.shape[0]
    centroids = init.copy()
    history: list[float] = []
    prev: float | None = None
    assignment = np.zeros(n, dtype=np.intp)

    for _ in range(KMEANS_MAX_ITER):
        d2 = _all_sqdist(points, centroids)
        assignment = np.argmin(d2, axis=1)  # ties go to the lowest cluster
        _repair_empty(points, centroids, assignment, k)
        for c in range(k):
            centroids[c] = points[assignment == c].mean(axis=0)
        d2 = _all_sqdist(points, centroids)
        objective = float(d2[np.arange(n), assignment].sum())
        history.append(objective)
        if prev is not None and (prev == 0.0 or prev - objective < KMEANS_REL_TOL * prev):
            break
        prev = objective

    distances = np.sqrt(_all_sqdist(points, centroids)[np.arange(n), assignment])
    return ClusterModel(
        k=k,
        centroids=centroids.copy(),
        assignment=assignment,
        objective=history[-1],
        objective_history=tuple(history),
        distances=distances,
    )


def _repair_empty(
    points: np.ndarray, centroids: np.ndarray, assignment: np.ndarray, k: int
) -> None:
    """Give each empty cluster the globally farthest reassignable point."""
    counts = np.bincount(assignment, minlength=k)
    for c in np.flatnonzero(counts == 0):
        d = np.sqrt(_sqdist_assigned(points, centroids, assignment))
        movable = counts[assignment] > 1
        d = np.where(movable, d, -np.inf)
        donor = int(np.argmax(d))  # argmax takes the lowest index on ties
        counts[assignment[donor]] -= 1
        assignment[donor] = c
        counts[c] = 1
        centroids[c] = points[donor]


def _sqdist_assigned(
    points: np.ndarray, centroids: np.ndarray, assignment: np.ndarray
) -> np.ndarray:
    diff = points - centroids[assignment]
    if diff.ndim == 1:
        return diff * diff
    return np.sum(diff * diff, axis=1)


def select_representatives(model: ClusterModel, scores: ScoreSet) -> SelectionResult:
    """Pick the frame nearest each centroid; rank the rest by proximity.

    Within a cluster the representative is the member with minimal distance
    to the centroid, ties broken by lowest frame index. Remaining frames are
    ranked ascending by their own centroid distance, same tie-break.
    """
    ids = scores.frame_ids
    rep_indices: list[int] = []
    for c in range(model.k):
        members = np.flatnonzero(model.assignment == c)
        best = members[np.argmin(model.distances[members])]  # first min wins
        rep_indices.append(int(best))
    rep_set = set(rep_indices)
    rest = [i for i in range(len(ids)) if i not in rep_set]
    rest.sort(key=lambda i: (model.distances[i], i))
    return SelectionResult(
        representatives=tuple(ids[i] for i in rep_indices),
        ranking=tuple(ids[i] for i in rest),
        distances={ids[i]: float(model.distances[i]) for i in range(len(ids))},
    )


def run_afse(
    frames: Sequence[FrameSource],
    reference_id: str,
    params: FeatureParams = FeatureParams(),
    weights: WeightConfig = WeightConfig(),
    k: int = 5,
    seed: int = 2024,
    normalize_features: bool = False,
    cluster_on: str = "score",
    jobs: int = 1,
) -> AfseResult:
    """Full selection pipeline: features -> composite scores -> k-means ->
    representatives.

    ``cluster_on="score"`` clusters the scalar composite score (the default
    and the documented behavior); ``"features"`` is an opt-in extension that
    clusters the 5-D feature vectors instead. The reference frame itself
    participates in clustering (its similarity scores are well defined).
    """
    if k < 1 or k > len(frames):
        raise SelectionError(f"k must be in [1, {len(frames)}], got {k}")
    ids, features = extract_feature_table(frames, reference_id, params, jobs=jobs)
    score_set = score_frames(ids, features, weights, reference_id, normalize=normalize_features)
    if cluster_on == "score":
        model = kmeans_fit(score_set, k, seed)
    elif cluster_on == "features":
        fvs = minmax_normalize(features) if normalize_features else features
        table = np.array([fv.as_tuple() for fv in fvs], dtype=np.float64)
        model = _lloyd(table, k, seed)
    else:
        raise SelectionError(f"unknown cluster space {cluster_on!r}")
    selection = select_representatives(model, score_set)
    return AfseResult(
        frame_ids=ids,
        features=tuple(features),
        scores=score_set,
        model=model,
        selection=selection,
        normalized=normalize_features,
    )


def run_afse_without_scorer(
    frames: Sequence[FrameSource],
    reference_id: str,
    params: FeatureParams = FeatureParams(),
    r: int = 5,
    seed: int = 2024,
    jobs: int = 1,
) -> AfseResult:
    """Ablated pipeline: cluster the unweighted mean of the five features.

    The shape score is unbounded, so it is first squashed to [0, 1] by
    min-max over the dataset (a dataset-constant shape score maps to 0);
    the clustered value is then mean(B, C, E, H, S_norm) per frame.
    """
    if r < 1 or r > len(frames):
        raise SelectionError(f"r must be in [1, {len(frames)}], got {r}")
    ids, features = extract_feature_table(frames, reference_id, params, jobs=jobs)
    table = np.array([fv.as_tuple() for fv in features], dtype=np.float64)
    s = table[:, 4]
    span = s.max() - s.min()
    s_norm = (s - s.min()) / span if span > 0 else np.zeros_like(s)
    values = (table[:, 0] + table[:, 1] + table[:, 2] + table[:, 3] + s_norm) / 5.0
    score_set = ScoreSet(
        frame_ids=ids, scores=tuple(values.tolist()), reference_id=reference_id
    )
    model = kmeans_fit(score_set, r, seed)
    selection = select_representatives(model, score_set)
    return AfseResult(
        frame_ids=ids,
        features=tuple(features),
        scores=score_set,
        model=model,
        selection=selection,
    )


def select_afse_wo_scorer(
    frames: Sequence[FrameSource],
    reference_id: str,
    r: int,
    seed: int,
    params: FeatureParams = FeatureParams(),
    jobs: int = 1,
) -> tuple[str, ...]:
    result = run_afse_without_scorer(frames, reference_id, params, r, seed, jobs=jobs)
    return result.selection.representatives


def select_random(frame_ids: Sequence[str], r: int, seed: int) -> tuple[str, ...]:
    """r distinct frame ids: seeded Fisher-Yates shuffle, first r taken."""
    n = len(frame_ids)
    if not 1 <= r <= n:
        raise SelectionError(f"r must be in [1, {n}], got {r}")
    pool = list(frame_ids)
    SplitMix64(seed).shuffle(pool)
    return tuple(pool[:r])


def select_uniform(frame_ids: Sequence[str], r: int) -> tuple[str, ...]:
    """Evenly spaced frame ids: indices round(j*(N-1)/(r-1)), halves up.

    Duplicate indices (possible only for tiny N) are dropped and replaced
    by the lowest unused indices; the result is reported in index order.
    """
    n = len(frame_ids)
    if not 1 <= r <= n:
        raise SelectionError(f"r must be in [1, {n}], got {r}")
    if r == 1:
        picked = [0]
    else:
        picked = [math.floor(j * (n - 1) / (r - 1) + 0.5) for j in range(r)]
    chosen: list[int] = []
    for i in picked:
        if i not in chosen:
            chosen.append(i)
    unused = (i for i in range(n) if i not in set(chosen))
    while len(chosen) < r:
        chosen.append(next(unused))
    return tuple(frame_ids[i] for i in sorted(chosen))
