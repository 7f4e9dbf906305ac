"""Per-frame feature scores used to compare frames against a reference.

Five scores are produced for every frame:

* brightness      B = mean(gray) / 255                          in [0, 1]
* contrast        C = population-std(gray) / 255                in [0, 1]
* edge_density    E = fraction of Canny edge pixels             in [0, 1]
* color_similarity  H = Pearson correlation of the frame's and the
                    reference's 2-D hue/saturation histograms   in [-1, 1]
* shape_similarity  S = -ln(sum_i |hu_ref_i - hu_i| + epsilon), from the
                    seven Hu invariants of the raw grayscale intensities;
                    bounded above by -ln(epsilon)

B, C, E depend only on the frame itself; H and S compare it against a
precomputed reference profile. All operations are pure and reentrant, so
per-frame extraction can fan out across workers; callers must assemble
results by frame index, never by completion order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import channels, to_grayscale, to_hsv, validate_edge_map, validate_raster

# Max L2 gradient magnitude component from a 3x3 Sobel on 8-bit input.
_SOBEL_MAX = 255 * 4

# tan(22.5 degrees), sector boundary for gradient-direction quantization.
_TAN_22_5 = math.sqrt(2.0) - 1.0

_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = np.array([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]])


class FeatureError(ValueError):
    """Raised when an image cannot support a requested feature."""


@dataclass(frozen=True)
class FeatureParams:
    """Tunable constants of the feature extractors.

    Edge density is sensitive to the Canny thresholds, so all of them are
    surfaced here (and on the CLI) rather than hard-coded.
    """

    canny_low: float = 50.0
    canny_high: float = 150.0
    gaussian_sigma: float = 1.4
    hist_bins_h: int = 32
    hist_bins_s: int = 32
    hu_epsilon: float = 1e-10

    def __post_init__(self) -> None:
        if not 0 <= self.canny_low < self.canny_high <= _SOBEL_MAX:
            raise ValueError(
                f"require 0 <= canny_low < canny_high <= {_SOBEL_MAX}, "
                f"got ({self.canny_low}, {self.canny_high})"
            )
        if self.gaussian_sigma <= 0:
            raise ValueError(f"gaussian_sigma must be positive, got {self.gaussian_sigma}")
        if self.hist_bins_h < 2 or self.hist_bins_s < 2:
            raise ValueError("histogram bin counts must be >= 2")
        if self.hu_epsilon <= 0:
            raise ValueError(f"hu_epsilon must be positive, got {self.hu_epsilon}")

    @property
    def max_shape_similarity(self) -> float:
        return -math.log(self.hu_epsilon)


@dataclass(frozen=True)
class FeatureVector:
    brightness: float
    contrast: float
    edge_density: float
    color_similarity: float
    shape_similarity: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (
            self.brightness,
            self.contrast,
            self.edge_density,
            self.color_similarity,
            self.shape_similarity,
        )


@dataclass(frozen=True)
class ReferenceProfile:
    """Precomputed per-reference data needed by the similarity features."""

    histogram: np.ndarray
    hu: np.ndarray


def brightness(gray: np.ndarray) -> float:
    """Mean intensity / 255, computed from the exact integer pixel sum so
    the result is a single correctly rounded division."""
    gray = _require_gray(gray)
    total = int(gray.sum(dtype=np.int64))
    return total / (255 * gray.size)


def contrast(gray: np.ndarray) -> float:
    """Population standard deviation (divide by N) of intensities, / 255.

    The variance comes from exact integer moments, (N*sum(x^2) - sum(x)^2)
    / N^2, so shifting all pixels by a constant leaves C bit-identical and
    any integer-based reimplementation reproduces it exactly.
    """
    gray = _require_gray(gray)
    x = gray.astype(np.int64)
    n = gray.size
    s1 = int(x.sum())
    s2 = int((x * x).sum())
    return math.sqrt((n * s2 - s1 * s1) / (n * n)) / 255.0


def _require_gray(img: np.ndarray) -> np.ndarray:
    img = validate_raster(img)
    if channels(img) != 1:
        raise FeatureError("expected a 1-channel raster")
    return img


def _correlate(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2-D correlation with replicated borders.

    Kernel taps accumulate in row-major order so results are bit-stable:
    any reimplementation summing taps in the same order reproduces them
    exactly.
    """
    kh, kw = kernel.shape
    ph, pw = kh // 2, kw // 2
    h, w = img.shape
    padded = np.pad(img, ((ph, ph), (pw, pw)), mode="edge")
    acc = np.zeros((h, w), dtype=np.float64)
    for ky in range(kh):
        for kx in range(kw):
            acc += kernel[ky, kx] * padded[ky : ky + h, kx : kx + w]
    return acc


def gaussian_kernel(sigma: float, size: int = 5) -> np.ndarray:
    """Normalized Gaussian tap grid.

    Entries come from math.exp and the normalizer accumulates in row-major
    order, so an element-by-element reimplementation is bit-identical.
    """
    half = size // 2
    k = np.empty((size, size), dtype=np.float64)
    for ky in range(size):
        for kx in range(size):
            dy, dx = ky - half, kx - half
            k[ky, kx] = math.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
    total = 0.0
    for v in k.flat:
        total += v
    return k / total


def canny(gray: np.ndarray, params: FeatureParams = FeatureParams()) -> np.ndarray:
    """Canny edge detection, full pipeline, hand-rolled.

    Stages: 5x5 Gaussian blur (replicated border), 3x3 Sobel, L2 gradient
    magnitude, non-maximum suppression over 4 quantized directions, then
    double-threshold hysteresis with 8-connectivity.

    Pinned conventions (the detector is exactly reproducible from these):

    * direction sectors split at tan(22.5 deg) on |gy| / |gx|; diagonal
      sector resolved by whether gx and gy share a sign (y points down)
    * a pixel survives suppression iff its magnitude is strictly greater
      than the neighbor earlier in raster order and >= the later one, so
      plateau ties keep exactly one pixel
    * image-border pixels never survive suppression
    * weak threshold: magnitude >= canny_low; strong: >= canny_high

    Returns a uint8 edge map with values in {0, 255}.
    """
    gray = _require_gray(gray)
    h, w = gray.shape
    if h < 5 or w < 5:
        raise FeatureError(f"image {w}x{h} smaller than the 5x5 kernel footprint")

    blurred = _correlate(gray.astype(np.float64), gaussian_kernel(params.gaussian_sigma))
    gx = _correlate(blurred, _SOBEL_X)
    gy = _correlate(blurred, _SOBEL_Y)
    mag = np.sqrt(gx * gx + gy * gy)

    ax = np.abs(gx)
    ay = np.abs(gy)
    horizontal = ay <= _TAN_22_5 * ax
    vertical = ~horizontal & (ax <= _TAN_22_5 * ay)
    diagonal = ~horizontal & ~vertical
    same_sign = (gx > 0) == (gy > 0)
    diag_main = diagonal & same_sign  # gradient along "\"
    diag_anti = diagonal & ~same_sign  # gradient along "/"

    before = np.zeros_like(mag)
    after = np.zeros_like(mag)
    inner = np.s_[1:-1, 1:-1]
    for sector, (by, bx), (ay_, ax_) in (
        (horizontal, (0, -1), (0, 1)),
        (vertical, (-1, 0), (1, 0)),
        (diag_main, (-1, -1), (1, 1)),
        (diag_anti, (-1, 1), (1, -1)),
    ):
        sel = sector[inner]
        before[inner][sel] = mag[1 + by : h - 1 + by, 1 + bx : w - 1 + bx][sel]
        after[inner][sel] = mag[1 + ay_ : h - 1 + ay_, 1 + ax_ : w - 1 + ax_][sel]

    keep = np.zeros((h, w), dtype=bool)
    keep[inner] = (mag[inner] > before[inner]) & (mag[inner] >= after[inner])

    strong = keep & (mag >= params.canny_high)
    weak = keep & (mag >= params.canny_low)
    edges = _hysteresis(strong, weak)
    return np.where(edges, np.uint8(255), np.uint8(0))


def _hysteresis(strong: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Grow strong seeds through 8-connected candidate pixels to a fixpoint."""
    edges = strong.copy()
    while True:
        grown = edges.copy()
        grown[1:, :] |= edges[:-1, :]
        grown[:-1, :] |= edges[1:, :]
        grown[:, 1:] |= edges[:, :-1]
        grown[:, :-1] |= edges[:, 1:]
        grown[1:, 1:] |= edges[:-1, :-1]
        grown[1:, :-1] |= edges[:-1, 1:]
        grown[:-1, 1:] |= edges[1:, :-1]
        grown[:-1, :-1] |= edges[1:, 1:]
        grown &= candidates
        grown |= edges
        if (grown == edges).all():
            return edges
        edges = grown


def edge_density(edges: np.ndarray) -> float:
    edges = validate_edge_map(edges)
    return int(np.count_nonzero(edges)) / edges.size


def hsv_histogram(img: np.ndarray, params: FeatureParams = FeatureParams()) -> np.ndarray:
    """2-D histogram of (hue, saturation) counts; value channel is ignored.

    Uniform bins over H in [0, 360) x S in [0, 1]; S = 1 lands in the top
    saturation bin. Bin counts always sum to the pixel count.
    """
    img = validate_raster(img)
    if channels(img) == 1:
        img = np.dstack([img, img, img])
    hue, sat, _ = to_hsv(img)
    hb = np.floor(hue / 360.0 * params.hist_bins_h).astype(np.intp)
    sb = np.minimum(
        np.floor(sat * params.hist_bins_s).astype(np.intp), params.hist_bins_s - 1
    )
    flat = hb * params.hist_bins_s + sb
    counts = np.bincount(flat.ravel(), minlength=params.hist_bins_h * params.hist_bins_s)
    return counts.reshape(params.hist_bins_h, params.hist_bins_s).astype(np.float64)


def hist_correlation(h1: np.ndarray, h2: np.ndarray) -> float:
    """Pearson correlation of the flattened bin vectors, clamped to [-1, 1].

    If either vector has zero variance the correlation is undefined; the
    convention here is 1.0 for identical vectors and 0.0 otherwise.
    """
    a = np.asarray(h1, dtype=np.float64)
    b = np.asarray(h2, dtype=np.float64)
    if a.shape != b.shape:
        raise FeatureError(f"histogram shapes differ: {a.shape} vs {b.shape}")
    x = a.ravel()
    y = b.ravel()
    xm = x - x.mean()
    ym = y - y.mean()
    sx = float(np.dot(xm, xm))
    sy = float(np.dot(ym, ym))
    if sx == 0.0 or sy == 0.0:
        return 1.0 if np.array_equal(x, y) else 0.0
    denom = math.sqrt(sx * sy)
    if denom == 0.0:
        # sx*sy underflowed to zero; separate roots stay positive
        denom = math.sqrt(sx) * math.sqrt(sy)
    r = float(np.dot(xm, ym)) / denom
    return float(np.clip(r, -1.0, 1.0))


def hu_moments(gray: np.ndarray) -> np.ndarray:
    """Seven Hu invariants of the raw grayscale intensity image.

    Raw moments m_pq = sum x^p y^q I(x, y) over pixel coordinates, central
    moments about the intensity centroid, scale normalization
    eta_pq = mu_pq / mu_00^(1 + (p+q)/2), then the standard seven
    invariants. Intensities are used as-is: no binarization and no log
    remapping of the outputs, since downstream scores subtract the raw
    invariant values.
    """
    gray = _require_gray(gray)
    img = gray.astype(np.float64)
    m00 = img.sum()
    if m00 == 0.0:
        raise FeatureError("moment normalization undefined for an all-zero image")
    h, w = gray.shape
    xs = np.arange(w, dtype=np.float64)
    ys = np.arange(h, dtype=np.float64)
    xbar = float((img * xs[None, :]).sum() / m00)
    ybar = float((img * ys[:, None]).sum() / m00)
    dx = xs - xbar
    dy = ys - ybar

    def mu(p: int, q: int) -> float:
        return float(dy**q @ img @ dx**p)

    def eta(p: int, q: int) -> float:
        return mu(p, q) / m00 ** (1.0 + (p + q) / 2.0)

    n20, n02, n11 = eta(2, 0), eta(0, 2), eta(1, 1)
    n30, n03 = eta(3, 0), eta(0, 3)
    n21, n12 = eta(2, 1), eta(1, 2)

    a = n30 + n12
    b = n21 + n03
    h1 = n20 + n02
    h2 = (n20 - n02) ** 2 + 4.0 * n11**2
    h3 = (n30 - 3.0 * n12) ** 2 + (3.0 * n21 - n03) ** 2
    h4 = a**2 + b**2
    h5 = (n30 - 3.0 * n12) * a * (a**2 - 3.0 * b**2) + (3.0 * n21 - n03) * b * (
        3.0 * a**2 - b**2
    )
    h6 = (n20 - n02) * (a**2 - b**2) + 4.0 * n11 * a * b
    h7 = (3.0 * n21 - n03) * a * (a**2 - 3.0 * b**2) - (n30 - 3.0 * n12) * b * (
        3.0 * a**2 - b**2
    )
    return np.array([h1, h2, h3, h4, h5, h6, h7])


def hu_distance_score(hu_ref: np.ndarray, hu_img: np.ndarray, epsilon: float) -> float:
    """Natural-log shape score: -ln(sum |hu_ref_i - hu_img_i| + epsilon)."""
    diff = float(np.abs(np.asarray(hu_ref) - np.asarray(hu_img)).sum())
    return -math.log(diff + epsilon)


def shape_similarity(
    img: np.ndarray, ref: np.ndarray, params: FeatureParams = FeatureParams()
) -> float:
    hu_img = hu_moments(to_grayscale(img))
    hu_ref = hu_moments(to_grayscale(ref))
    return hu_distance_score(hu_ref, hu_img, params.hu_epsilon)


def build_reference_profile(
    ref: np.ndarray, params: FeatureParams = FeatureParams()
) -> ReferenceProfile:
    ref = validate_raster(ref)
    return ReferenceProfile(
        histogram=hsv_histogram(ref, params),
        hu=hu_moments(to_grayscale(ref)),
    )


def extract_features(
    img: np.ndarray,
    ref_profile: ReferenceProfile,
    params: FeatureParams = FeatureParams(),
) -> FeatureVector:
    """Assemble the five per-frame scores for one frame."""
    img = validate_raster(img)
    gray = to_grayscale(img)
    fv = FeatureVector(
        brightness=brightness(gray),
        contrast=contrast(gray),
        edge_density=edge_density(canny(gray, params)),
        color_similarity=hist_correlation(hsv_histogram(img, params), ref_profile.histogram),
        shape_similarity=hu_distance_score(ref_profile.hu, hu_moments(gray), params.hu_epsilon),
    )
    _check_ranges(fv, params)
    return fv


def _check_ranges(fv: FeatureVector, params: FeatureParams) -> None:
    ok = (
        0.0 <= fv.brightness <= 1.0
        and 0.0 <= fv.contrast <= 1.0
        and 0.0 <= fv.edge_density <= 1.0
        and -1.0 <= fv.color_similarity <= 1.0
        and fv.shape_similarity <= params.max_shape_similarity + 1e-9
    )
    if not ok:
        raise FeatureError(f"feature vector out of range: {fv}")
