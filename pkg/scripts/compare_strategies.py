"""Compare frame-selection strategies on one sequence.

Runs AFSE, its scorer-free variant, uniform, and random selection over a
frame directory (or a generated drifting-disk sequence when no directory
is given), then reports each strategy's picks and the mean distance of
those picks to their assigned centroid under the AFSE cluster model.
Lower is better: it measures how central the chosen frames are to the
structure AFSE found.

    python3 scripts/compare_strategies.py --frames out/demo/frames --r 5
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from frameselect import (
    ingest,
    run_afse,
    select_afse_wo_scorer,
    select_random,
    select_uniform,
)
from frameselect.raster import load_image
from frameselect.synthetic import drifting_disk_sequence


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--frames", type=Path, default=None, help="frame directory (PNG)")
    parser.add_argument("--r", type=int, default=5, help="frames to select")
    parser.add_argument("--seed", type=int, default=2024, help="clustering and sampling seed")
    parser.add_argument("--length", type=int, default=100, help="synthetic sequence length")
    args = parser.parse_args()

    if args.frames is None:
        frames = [(fid, img) for fid, img, _ in drifting_disk_sequence(args.length, (64, 64))]
        print(f"no --frames given, using a {args.length}-frame synthetic drift")
    else:
        dataset = ingest(args.frames)
        frames = [(rec.frame_id, load_image(rec.image_path)) for rec in dataset.frames]
    ids = [fid for fid, _ in frames]
    reference = ids[0]

    result = run_afse(frames, reference, k=args.r, seed=args.seed)
    picks = {
        "AFSE": list(result.selection.representatives),
        "AFSE w/o scorer": list(select_afse_wo_scorer(frames, reference, r=args.r, seed=args.seed)),
        "Uniform": list(select_uniform(ids, args.r)),
        "Random": list(select_random(ids, args.r, seed=args.seed)),
    }

    index = {fid: i for i, fid in enumerate(result.frame_ids)}
    dist = result.model.distances
    print(f"\n{len(ids)} frames, r={args.r}, seed={args.seed}, reference={reference}")
    print(f"{'strategy':<16} {'mean dist':>10}  picks")
    for name, chosen in picks.items():
        mean = float(np.mean([dist[index[fid]] for fid in chosen]))
        print(f"{name:<16} {mean:>10.6f}  {', '.join(chosen)}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
