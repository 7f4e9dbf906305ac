"""Deterministic synthetic frames for demos and tests.

Everything here is a pure function of its arguments: no RNG, no I/O. The
drifting-disk sequence mimics a short clinical clip: one bright object
that slowly moves, grows, brightens, and shifts color over a darker
textured background, which gives all five features real variation.
"""

from __future__ import annotations

import numpy as np


def disk_mask(
    size: tuple[int, int], center: tuple[float, float], radius: float
) -> np.ndarray:
    """Boolean disk: pixels with (x-cx)^2 + (y-cy)^2 <= r^2."""
    h, w = size
    cy, cx = center
    yy, xx = np.mgrid[0:h, 0:w]
    return (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2


def disk_frame(
    size: tuple[int, int],
    center: tuple[float, float],
    radius: float,
    foreground: int = 200,
    background: int = 30,
) -> np.ndarray:
    """Grayscale frame with a hard-edged disk on a flat background."""
    img = np.full(size, background, dtype=np.uint8)
    img[disk_mask(size, center, radius)] = foreground
    return img


def checkerboard(size: tuple[int, int], cell: int, low: int = 0, high: int = 255) -> np.ndarray:
    """Grayscale checkerboard with square cells."""
    h, w = size
    yy, xx = np.mgrid[0:h, 0:w]
    board = ((yy // cell) + (xx // cell)) % 2
    return np.where(board == 1, high, low).astype(np.uint8)


def step_edge(size: tuple[int, int], column: int, low: int = 0, high: int = 255) -> np.ndarray:
    """Grayscale vertical step: columns < `column` are low, the rest high."""
    h, w = size
    img = np.full((h, w), low, dtype=np.uint8)
    img[:, column:] = high
    return img


def gradient_ramp(size: tuple[int, int], horizontal: bool = True) -> np.ndarray:
    """Linear 0..255 ramp, useful as a fully textured background."""
    h, w = size
    axis = np.linspace(0.0, 255.0, w if horizontal else h)
    ramp = np.tile(axis, (h, 1)) if horizontal else np.tile(axis[:, None], (1, w))
    return np.floor(ramp + 0.5).clip(0, 255).astype(np.uint8)


def drifting_disk_frame(
    index: int, n: int = 100, size: tuple[int, int] = (96, 96)
) -> tuple[np.ndarray, np.ndarray]:
    """Frame ``index`` of the drifting-disk sequence, with its mask.

    Across the sequence the disk drifts diagonally, its radius swells,
    its brightness ramps up, and its color tint rotates from warm to
    cool, over a fixed dim checkerboard. Returns (RGB image, bool mask).
    """
    if not 0 <= index < n:
        raise ValueError(f"index must be in [0, {n}), got {index}")
    h, w = size
    t = index / (n - 1) if n > 1 else 0.0

    cy = 0.30 * h + 0.40 * h * t
    cx = 0.30 * w + 0.40 * w * t
    radius = 0.12 * min(h, w) * (1.0 + 0.6 * t)
    value = int(round(90 + 130 * t))

    base = checkerboard(size, cell=max(4, min(h, w) // 12), low=18, high=42)
    mask = disk_mask(size, (cy, cx), radius)

    # Tint sweeps red -> blue while green stays mid, so hue and
    # saturation both move with t.
    red = value
    green = int(round(value * (0.45 + 0.15 * t)))
    blue = int(round(value * (0.25 + 0.70 * t)))
    rgb = np.dstack([base, base, base]).astype(np.uint8)
    rgb[mask] = np.array([red, green, blue], dtype=np.uint8)
    return rgb, mask


def drifting_disk_sequence(
    n: int = 100, size: tuple[int, int] = (96, 96)
) -> list[tuple[str, np.ndarray, np.ndarray]]:
    """The full sequence as (frame id, RGB image, mask) triples.

    Frame ids are zero-padded (frame_000, frame_001, ...) so filename
    order equals temporal order.
    """
    width = max(3, len(str(n - 1)))
    out = []
    for i in range(n):
        img, mask = drifting_disk_frame(i, n, size)
        out.append((f"frame_{i:0{width}d}", img, mask))
    return out
