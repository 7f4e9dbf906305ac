"""Image, mask, and color-space primitives.

Conventions used throughout the package:

* images ("rasters") are uint8 numpy arrays, row-major, origin top-left,
  x rightward (columns), y downward (rows); shape (H, W) for grayscale
  and (H, W, 3) for interleaved RGB
* masks are boolean (H, W) arrays, True = foreground
* edge maps are uint8 (H, W) arrays with values in {0, 255}

All functions are pure; arrays are never mutated in place.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image, UnidentifiedImageError

# ITU-R BT.601 luma weights, rounded half-up, so downstream feature values
# are bit-reproducible.
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


class RasterError(ValueError):
    """Raised for malformed rasters or undecodable image files."""


def validate_raster(img: np.ndarray) -> np.ndarray:
    arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise RasterError(f"raster must be uint8, got {arr.dtype}")
    if arr.ndim == 2:
        h, w = arr.shape
    elif arr.ndim == 3 and arr.shape[2] == 3:
        h, w = arr.shape[:2]
    else:
        raise RasterError(f"raster must be (H, W) or (H, W, 3), got shape {arr.shape}")
    if h < 1 or w < 1:
        raise RasterError(f"raster must have positive dimensions, got {w}x{h}")
    return arr


def channels(img: np.ndarray) -> int:
    return 1 if img.ndim == 2 else img.shape[2]


def round_half_up(x: np.ndarray) -> np.ndarray:
    """Round to nearest integer with halves going up (unlike numpy's
    banker's rounding). Assumes non-negative input."""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def to_grayscale(img: np.ndarray) -> np.ndarray:
    """BT.601 grayscale: gray = round(0.299 R + 0.587 G + 0.114 B).

    1-channel input is returned unchanged.
    """
    img = validate_raster(img)
    if img.ndim == 2:
        return img
    rgb = img.astype(np.float64)
    gray = _LUMA_R * rgb[:, :, 0] + _LUMA_G * rgb[:, :, 1] + _LUMA_B * rgb[:, :, 2]
    return np.clip(round_half_up(gray), 0, 255).astype(np.uint8)


def to_hsv(img: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hexcone RGB -> (H, S, V): H in degrees [0, 360), S and V in [0, 1].

    Achromatic pixels (R = G = B) get S = 0 and, by convention, H = 0.
    """
    img = validate_raster(img)
    if channels(img) != 3:
        raise RasterError("to_hsv requires a 3-channel raster")
    rgb = img.astype(np.float64) / 255.0
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    v = np.max(rgb, axis=2)
    cmin = np.min(rgb, axis=2)
    delta = v - cmin

    s = np.zeros_like(v)
    nonblack = v > 0
    s[nonblack] = delta[nonblack] / v[nonblack]

    h = np.zeros_like(v)
    chromatic = delta > 0
    d = np.where(chromatic, delta, 1.0)
    h = np.where(chromatic & (v == r), 60.0 * ((g - b) / d), h)
    h = np.where(chromatic & (v == g) & (v != r), 60.0 * ((b - r) / d) + 120.0, h)
    h = np.where(chromatic & (v == b) & (v != r) & (v != g), 60.0 * ((r - g) / d) + 240.0, h)
    h = np.where(h < 0, h + 360.0, h)
    h = np.where(h >= 360.0, h - 360.0, h)
    return h, s, v


def invert(img: np.ndarray) -> np.ndarray:
    img = validate_raster(img)
    return (255 - img.astype(np.int16)).astype(np.uint8)


def load_image(path: str | os.PathLike) -> np.ndarray:
    """Decode an 8-bit PNG or JPEG into a 1- or 3-channel raster.

    Grayscale files stay 1-channel, color files 3-channel; alpha is dropped.
    Deeper-than-8-bit files are rejected rather than silently rescaled.
    """
    suffix = os.path.splitext(str(path))[1].lower()
    if suffix not in IMAGE_SUFFIXES:
        raise RasterError(f"unsupported image format {suffix!r}: {path}")
    try:
        with Image.open(path) as im:
            mode = im.mode
            if mode in ("L", "RGB"):
                arr = np.asarray(im, dtype=np.uint8)
            elif mode in ("1", "LA"):
                arr = np.asarray(im.convert("L"), dtype=np.uint8)
            elif mode in ("P", "RGBA"):
                arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
            else:
                raise RasterError(f"unsupported pixel depth {mode!r} (8-bit only): {path}")
    except FileNotFoundError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise RasterError(f"cannot decode {path}: {exc}") from exc
    return validate_raster(arr)


def load_mask(path: str | os.PathLike) -> np.ndarray:
    """Load a binary mask: pixels with value > 127 are foreground.

    Color mask files are grayscaled first; the midpoint threshold tolerates
    compression noise in 0/255-encoded mask files.
    """
    img = load_image(path)
    gray = to_grayscale(img)
    return gray > 127


def mask_to_raster(mask: np.ndarray) -> np.ndarray:
    mask = validate_mask(mask)
    return np.where(mask, np.uint8(255), np.uint8(0))


def validate_mask(mask: np.ndarray) -> np.ndarray:
    arr = np.asarray(mask)
    if arr.dtype != bool or arr.ndim != 2:
        raise RasterError(f"mask must be a boolean (H, W) array, got {arr.dtype} {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise RasterError("mask must have positive dimensions")
    return arr


def validate_edge_map(edges: np.ndarray) -> np.ndarray:
    arr = np.asarray(edges)
    if arr.dtype != np.uint8 or arr.ndim != 2:
        raise RasterError(f"edge map must be uint8 (H, W), got {arr.dtype} {arr.shape}")
    if not np.isin(arr, (0, 255)).all():
        raise RasterError("edge map values must be 0 or 255")
    return arr


def save_image(img: np.ndarray, path: str | os.PathLike) -> None:
    img = validate_raster(img)
    Image.fromarray(img).save(path)


def save_mask(mask: np.ndarray, path: str | os.PathLike) -> None:
    save_image(mask_to_raster(mask), path)
