"""One shared orchestration path from frame sources to a selection manifest.

Both the CLI and the HTTP service call `run_strategy`, so a given
(frames, reference, params, weights, k, seed, strategy) tuple produces the
same manifest no matter which front end asked for it.
"""

from __future__ import annotations

from typing import Sequence

from .dataset import SelectionManifest, manifest_from_afse, manifest_from_membership
from .features import FeatureParams
from .selection import (
    STRATEGY_AFSE,
    STRATEGY_AFSE_WO_SCORER,
    STRATEGY_RANDOM,
    STRATEGY_UNIFORM,
    FrameSource,
    SelectionError,
    WeightConfig,
    extract_feature_table,
    run_afse,
    run_afse_without_scorer,
    score_frames,
    select_random,
    select_uniform,
)


def run_strategy(
    frames: Sequence[FrameSource],
    reference_id: str,
    params: FeatureParams,
    weights: WeightConfig,
    k: int,
    seed: int,
    strategy: str,
    normalize: bool = False,
    jobs: int = 1,
) -> SelectionManifest:
    """Run one selection strategy end to end and record it as a manifest.

    The clustering strategies carry cluster, distance, and proximity rank;
    the membership-only strategies (random, uniform) rank the unselected
    frames in frame order.
    """
    if strategy == STRATEGY_AFSE:
        result = run_afse(
            frames,
            reference_id,
            params,
            weights,
            k=k,
            seed=seed,
            normalize_features=normalize,
            jobs=jobs,
        )
        return manifest_from_afse(result, strategy, weights, params, seed)
    if strategy == STRATEGY_AFSE_WO_SCORER:
        result = run_afse_without_scorer(frames, reference_id, params, k, seed, jobs=jobs)
        return manifest_from_afse(result, strategy, weights, params, seed)
    ids, features = extract_feature_table(frames, reference_id, params, jobs)
    score_set = score_frames(ids, features, weights, reference_id, normalize)
    if strategy == STRATEGY_RANDOM:
        reps = select_random(ids, k, seed)
    elif strategy == STRATEGY_UNIFORM:
        reps = select_uniform(ids, k)
    else:
        raise SelectionError(f"unknown strategy {strategy!r}")
    return manifest_from_membership(
        ids,
        features,
        score_set.scores,
        reps,
        reference_id,
        strategy,
        weights,
        params,
        seed,
        normalized=normalize,
    )
