"""Write a synthetic drifting-disk sequence to disk.

Produces numbered PNG frames plus matching ground-truth masks, the same
fixture the test suite builds in memory. Useful for exercising the CLI
and the review service against a known dataset:

    python3 scripts/make_drifting_disk.py out/demo --frames 100 --size 64
"""

from __future__ import annotations

import argparse
from pathlib import Path

from frameselect.raster import save_image, save_mask
from frameselect.synthetic import drifting_disk_sequence


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("out", type=Path, help="output directory")
    parser.add_argument("--frames", type=int, default=100, help="sequence length")
    parser.add_argument("--size", type=int, default=64, help="square frame edge in px")
    args = parser.parse_args()

    frames_dir = args.out / "frames"
    masks_dir = args.out / "masks"
    frames_dir.mkdir(parents=True, exist_ok=True)
    masks_dir.mkdir(parents=True, exist_ok=True)

    count = 0
    for fid, img, mask in drifting_disk_sequence(args.frames, (args.size, args.size)):
        save_image(img, frames_dir / f"{fid}.png")
        save_mask(mask, masks_dir / f"{fid}.png")
        count += 1
    print(f"wrote {count} frames to {frames_dir} and masks to {masks_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
