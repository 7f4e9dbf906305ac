"""Shared fixtures: a synthetic image corpus and on-disk datasets."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from frameselect.raster import save_image, save_mask
from frameselect.synthetic import (
    checkerboard,
    disk_frame,
    disk_mask,
    drifting_disk_frame,
    drifting_disk_sequence,
    gradient_ramp,
    step_edge,
)


def _solid_rgb(size: tuple[int, int], color: tuple[int, int, int]) -> np.ndarray:
    h, w = size
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[:] = color
    return img


def _two_blobs(size: tuple[int, int]) -> np.ndarray:
    """Asymmetric shape on a zero background, so none of the Hu invariants
    sit near zero and rolling the canvas is an exact translation."""
    img = np.zeros(size, dtype=np.uint8)
    img[4:12, 3:9] = 220
    img[18:24, 14:26] = 160
    img[8:10, 20:23] = 255
    return img


def build_corpus() -> list[tuple[str, np.ndarray]]:
    """Named synthetic images covering constants, steps, checkerboards,
    disks, ramps, noise, and color layouts. All at least 5x5."""
    rng = np.random.default_rng(20240819)
    sz = (32, 32)
    corpus: list[tuple[str, np.ndarray]] = [
        ("const_black", np.zeros(sz, dtype=np.uint8)),
        ("const_mid", np.full(sz, 128, dtype=np.uint8)),
        ("const_white", np.full(sz, 255, dtype=np.uint8)),
        ("checker_4", checkerboard(sz, 4)),
        ("checker_8", checkerboard(sz, 8, low=30, high=200)),
        ("step_v", step_edge(sz, 16)),
        ("step_h", step_edge(sz, 16).T.copy()),
        ("step_soft", step_edge(sz, 10, low=80, high=170)),
        ("ramp_h", gradient_ramp(sz)),
        ("ramp_v", gradient_ramp(sz, horizontal=False)),
        ("disk_center", disk_frame(sz, (16.0, 16.0), 8.0)),
        ("disk_offset", disk_frame(sz, (10.0, 20.0), 6.0)),
        ("disk_small", disk_frame(sz, (16.0, 16.0), 4.0)),
        ("ring", np.where(
            disk_mask(sz, (16.0, 16.0), 10.0) & ~disk_mask(sz, (16.0, 16.0), 6.0),
            np.uint8(210), np.uint8(25))),
        ("blobs", _two_blobs(sz)),
        ("blobs_shift", np.roll(_two_blobs(sz), (3, 4), axis=(0, 1))),
        ("noise_a", rng.integers(0, 256, sz, dtype=np.uint8)),
        ("noise_b", rng.integers(0, 256, (48, 48), dtype=np.uint8)),
        ("solid_red", _solid_rgb(sz, (255, 0, 0))),
        ("solid_green", _solid_rgb(sz, (0, 255, 0))),
        ("solid_cyan", _solid_rgb(sz, (0, 255, 255))),
        ("half_red_green", np.concatenate(
            [_solid_rgb((32, 16), (255, 0, 0)), _solid_rgb((32, 16), (0, 255, 0))],
            axis=1)),
        ("rgb_noise", rng.integers(0, 256, (32, 32, 3), dtype=np.uint8)),
    ]
    for i in (0, 7):
        img, _ = drifting_disk_frame(i, 8, (48, 48))
        corpus.append((f"drift_{i}", img))
    return corpus


@pytest.fixture(scope="session")
def corpus() -> list[tuple[str, np.ndarray]]:
    return build_corpus()


def write_sequence(root: Path, n: int, size: tuple[int, int]) -> tuple[Path, Path]:
    """Write a drifting-disk sequence as frames/ and masks/ PNG dirs."""
    frames_dir = root / "frames"
    masks_dir = root / "masks"
    frames_dir.mkdir(parents=True)
    masks_dir.mkdir(parents=True)
    for fid, img, mask in drifting_disk_sequence(n, size):
        save_image(img, frames_dir / f"{fid}.png")
        save_mask(mask, masks_dir / f"{fid}.png")
    return frames_dir, masks_dir


@pytest.fixture(scope="session")
def dataset10(tmp_path_factory) -> tuple[Path, Path]:
    return write_sequence(tmp_path_factory.mktemp("ds10"), 10, (48, 48))


@pytest.fixture(scope="session")
def dataset20(tmp_path_factory) -> tuple[Path, Path]:
    return write_sequence(tmp_path_factory.mktemp("ds20"), 20, (64, 64))
