"""Feature extractors against hand values and independent loop oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from frameselect import (
    FeatureError,
    FeatureParams,
    FeatureVector,
    WeightConfig,
    brightness,
    build_reference_profile,
    canny,
    composite_score,
    contrast,
    edge_density,
    extract_features,
    hist_correlation,
    hsv_histogram,
    hu_moments,
    shape_similarity,
    to_grayscale,
    to_hsv,
)
from frameselect.features import gaussian_kernel, hu_distance_score
from frameselect.raster import invert
from frameselect.synthetic import disk_frame, step_edge

from oracles import (
    brightness_loops,
    canny_loops,
    contrast_loops,
    gaussian_kernel_loops,
    histogram_loops,
    hu_loops,
    pearson_loops,
)

gray_arrays = hnp.arrays(
    dtype=np.uint8,
    shape=st.tuples(st.integers(1, 16), st.integers(1, 16)),
    elements=st.integers(0, 255),
)


def _require_close(actual, expected, rel, abs_floor):
    """Relative comparison with an absolute floor for near-zero values."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    diff = np.abs(actual - expected)
    ok = diff <= np.maximum(rel * np.abs(expected), abs_floor)
    assert ok.all(), f"diff {diff} vs expected {expected}"


class TestFeatureParams:
    def test_defaults(self):
        p = FeatureParams()
        assert (p.canny_low, p.canny_high) == (50.0, 150.0)
        assert p.gaussian_sigma == 1.4
        assert (p.hist_bins_h, p.hist_bins_s) == (32, 32)
        assert p.hu_epsilon == 1e-10

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"canny_low": -1.0},
            {"canny_low": 150.0, "canny_high": 150.0},
            {"canny_low": 200.0, "canny_high": 100.0},
            {"canny_high": 1021.0},
            {"gaussian_sigma": 0.0},
            {"gaussian_sigma": -1.4},
            {"hist_bins_h": 1},
            {"hist_bins_s": 0},
            {"hu_epsilon": 0.0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            FeatureParams(**kwargs)

    def test_sobel_threshold_bound_is_inclusive(self):
        FeatureParams(canny_low=0.0, canny_high=1020.0)

    def test_max_shape_similarity(self):
        assert FeatureParams().max_shape_similarity == -math.log(1e-10)
        assert FeatureParams(hu_epsilon=1e-4).max_shape_similarity == -math.log(1e-4)


class TestBrightness:
    def test_all_zero(self):
        assert brightness(np.zeros((4, 4), dtype=np.uint8)) == 0.0

    def test_all_white(self):
        assert brightness(np.full((4, 4), 255, dtype=np.uint8)) == 1.0

    def test_checkerboard_half(self):
        img = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        assert brightness(img) == 0.5

    def test_mid_gray(self):
        assert brightness(np.full((32, 32), 128, dtype=np.uint8)) == 128 / 255

    @given(gray_arrays)
    def test_matches_integer_oracle_exactly(self, img):
        assert brightness(img) == brightness_loops(img)

    @given(gray_arrays)
    def test_invert_complement(self, img):
        # The integer sums complement exactly; the floats only to rounding.
        n = img.size
        assert int(img.sum(dtype=np.int64)) + int(invert(img).sum(dtype=np.int64)) == 255 * n
        assert abs(brightness(img) + brightness(invert(img)) - 1.0) <= 1e-12

    def test_rejects_rgb(self):
        with pytest.raises(FeatureError):
            brightness(np.zeros((4, 4, 3), dtype=np.uint8))


class TestContrast:
    def test_constant_is_zero(self):
        assert contrast(np.full((5, 5), 77, dtype=np.uint8)) == 0.0

    def test_two_point_half(self):
        assert contrast(np.array([[0, 255]], dtype=np.uint8)) == 0.5

    def test_same_distribution_same_value(self):
        assert contrast(np.array([[0, 0, 255, 255]], dtype=np.uint8)) == 0.5

    @given(gray_arrays)
    def test_matches_integer_oracle_exactly(self, img):
        assert contrast(img) == contrast_loops(img)

    @given(
        hnp.arrays(
            dtype=np.uint8,
            shape=st.tuples(st.integers(1, 12), st.integers(1, 12)),
            elements=st.integers(0, 100),
        ),
        st.integers(0, 155),
    )
    def test_shift_invariance_bit_exact(self, img, shift):
        shifted = (img.astype(np.int64) + shift).astype(np.uint8)
        assert contrast(img) == contrast(shifted)


class TestGaussianKernel:
    @pytest.mark.parametrize("sigma", [0.5, 1.0, 1.4, 2.7])
    def test_matches_loop_oracle_bitwise(self, sigma):
        got = gaussian_kernel(sigma)
        want = gaussian_kernel_loops(sigma, 5)
        assert got.shape == (5, 5)
        assert np.array_equal(got, want)

    def test_normalized_and_symmetric(self):
        k = gaussian_kernel(1.4)
        assert abs(k.sum() - 1.0) <= 1e-12
        assert np.array_equal(k, k.T)
        assert np.array_equal(k, k[::-1, ::-1])
        assert k.max() == k[2, 2]


class TestCanny:
    def test_constant_has_no_edges(self):
        for value in (0, 128, 255):
            img = np.full((16, 16), value, dtype=np.uint8)
            assert not canny(img).any()

    def test_vertical_step_matches_oracle(self):
        img = step_edge((16, 16), 8)
        p = FeatureParams()
        got = canny(img, p)
        want = canny_loops(img, p.gaussian_sigma, p.canny_low, p.canny_high)
        assert np.array_equal(got, want)
        ys, xs = np.nonzero(got)
        assert len(xs) > 0
        # A single near-vertical response localized at the step.
        assert len(set(xs)) <= 2
        assert all(6 <= x <= 9 for x in xs)

    def test_bright_square_contour_matches_oracle(self):
        img = np.zeros((32, 32), dtype=np.uint8)
        img[11:21, 11:21] = 255
        p = FeatureParams()
        got = canny(img, p)
        want = canny_loops(img, p.gaussian_sigma, p.canny_low, p.canny_high)
        assert np.array_equal(got, want)
        assert got.any()
        # Contour responds on all four sides of the square.
        ys, xs = np.nonzero(got)
        assert ys.min() <= 12 and ys.max() >= 19
        assert xs.min() <= 12 and xs.max() >= 19

    def test_border_never_edges(self, corpus):
        for _, img in corpus:
            edges = canny(to_grayscale(img))
            assert not edges[0].any() and not edges[-1].any()
            assert not edges[:, 0].any() and not edges[:, -1].any()

    @settings(max_examples=15, deadline=None)
    @given(
        hnp.arrays(
            dtype=np.uint8,
            shape=st.tuples(st.integers(7, 20), st.integers(7, 20)),
            elements=st.integers(0, 255),
        ),
        st.sampled_from([(50.0, 150.0), (20.0, 60.0), (100.0, 400.0)]),
    )
    def test_random_images_pixel_exact(self, img, thresholds):
        low, high = thresholds
        p = FeatureParams(canny_low=low, canny_high=high)
        got = canny(img, p)
        want = canny_loops(img, p.gaussian_sigma, low, high)
        assert np.array_equal(got, want)

    def test_corpus_pixel_exact(self, corpus):
        p = FeatureParams()
        for name, img in corpus:
            g = to_grayscale(img)
            got = canny(g, p)
            want = canny_loops(g, p.gaussian_sigma, p.canny_low, p.canny_high)
            assert np.array_equal(got, want), name


class TestEdgeDensity:
    def test_all_zero(self):
        assert edge_density(np.zeros((8, 8), dtype=np.uint8)) == 0.0

    def test_all_edges(self):
        assert edge_density(np.full((8, 8), 255, dtype=np.uint8)) == 1.0

    def test_sixteen_pixels(self):
        edges = np.zeros((16, 16), dtype=np.uint8)
        edges.ravel()[:16] = 255
        assert edge_density(edges) == 0.0625

    def test_rejects_non_binary(self):
        with pytest.raises(Exception):
            edge_density(np.full((8, 8), 7, dtype=np.uint8))


class TestHsvHistogram:
    def test_solid_color_one_hot(self):
        img = np.zeros((8, 8, 3), dtype=np.uint8)
        img[..., 0] = 255
        h = hsv_histogram(img)
        assert h.shape == (32, 32)
        assert h.sum() == 64
        assert h.max() == 64
        assert np.count_nonzero(h) == 1
        # Pure red: hue 0 in the lowest hue bin, saturation 1 clamped to the
        # top saturation bin.
        assert h[0, 31] == 64

    def test_half_red_half_green(self):
        red = np.zeros((8, 4, 3), dtype=np.uint8)
        red[..., 0] = 255
        green = np.zeros((8, 4, 3), dtype=np.uint8)
        green[..., 1] = 255
        h = hsv_histogram(np.concatenate([red, green], axis=1))
        nz = np.nonzero(h)
        assert len(nz[0]) == 2
        assert set(h[nz]) == {32.0}

    def test_grayscale_input_promoted(self):
        g = np.full((6, 6), 80, dtype=np.uint8)
        h = hsv_histogram(g)
        # Gray pixels: hue 0, saturation 0.
        assert h[0, 0] == 36
        assert h.sum() == 36

    def test_counts_conserved_and_match_oracle(self, corpus):
        p = FeatureParams()
        for name, img in corpus:
            h = hsv_histogram(img, p)
            assert h.sum() == img.shape[0] * img.shape[1], name
            rgb = img if img.ndim == 3 else np.dstack([img, img, img])
            hue, sat, _ = to_hsv(rgb)
            assert np.array_equal(h, histogram_loops(hue, sat, p.hist_bins_h, p.hist_bins_s)), name

    def test_custom_bin_counts(self):
        img = np.zeros((5, 5, 3), dtype=np.uint8)
        img[..., 2] = 200
        h = hsv_histogram(img, FeatureParams(hist_bins_h=8, hist_bins_s=4))
        assert h.shape == (8, 4)
        assert h.sum() == 25


class TestHistCorrelation:
    def test_self_correlation_is_one(self, corpus):
        for name, img in corpus:
            h = hsv_histogram(img)
            if h.std() == 0:
                continue
            assert hist_correlation(h, h) == 1.0, name

    def test_one_hot_pair_closed_form(self):
        a = np.zeros(1024)
        b = np.zeros(1024)
        a[3] = 64.0
        b[700] = 64.0
        r = hist_correlation(a, b)
        assert abs(r - (-1.0 / 1023.0)) <= 1e-12
        assert abs(r - pearson_loops(a, b)) <= 1e-12

    def test_affine_invariance(self):
        rng = np.random.default_rng(7)
        h = rng.random((32, 32))
        assert hist_correlation(h, 3.0 * h + 7.0) == 1.0

    def test_anticorrelated_reaches_minus_one(self):
        assert hist_correlation(np.array([0.0, 1.0]), np.array([1.0, 0.0])) == -1.0

    def test_zero_variance_conventions(self):
        const = np.full(16, 3.0)
        assert hist_correlation(const, const.copy()) == 1.0
        assert hist_correlation(const, np.full(16, 4.0)) == 0.0
        varying = np.arange(16, dtype=np.float64)
        assert hist_correlation(const, varying) == 0.0
        assert hist_correlation(varying, const) == 0.0

    def test_shape_mismatch_rejected(self):
        with pytest.raises(FeatureError):
            hist_correlation(np.zeros((4, 4)), np.zeros((4, 5)))

    @given(
        hnp.arrays(
            dtype=np.float64,
            shape=st.integers(2, 40),
            # histograms hold bin counts; the naive oracle is only a
            # trustworthy reference on count-scaled values
            elements=st.integers(0, 1000).map(float),
        ),
        st.randoms(use_true_random=False),
    )
    def test_matches_direct_summation(self, a, rnd):
        assume(a.max() > a.min())
        b = a.copy()
        idx = list(range(a.size))
        rnd.shuffle(idx)
        b = b[idx]
        got = hist_correlation(a, b)
        want = pearson_loops(a, b)
        assert abs(got - want) <= 1e-12
        assert -1.0 <= got <= 1.0

    def test_survives_variance_product_underflow(self):
        # sx and sy are each positive but sx*sy is below the smallest
        # subnormal, so a naive sqrt(sx*sy) denominator divides by zero
        a = np.array([3.3782968e-112, 0.0])
        assert hist_correlation(a, a) == 1.0
        assert hist_correlation(a, a[::-1].copy()) == -1.0
        assert hist_correlation(a, np.zeros(2)) == 0.0

    def test_symmetry(self, corpus):
        imgs = dict(corpus)
        h1 = hsv_histogram(imgs["rgb_noise"])
        h2 = hsv_histogram(imgs["noise_a"])
        assert hist_correlation(h1, h2) == hist_correlation(h2, h1)


# Oracle-agreement floor: invariants that are analytically zero (symmetric
# shapes) carry only cancellation noise, so relative error is meaningless
# below this magnitude.
HU_ABS_FLOOR = 1e-18


class TestHuMoments:
    def test_matches_loop_oracle(self, corpus):
        for name, img in corpus:
            g = to_grayscale(img)
            if not g.any():
                continue
            _require_close(hu_moments(g), hu_loops(g), rel=1e-9, abs_floor=HU_ABS_FLOOR)

    def test_translation_invariance(self, corpus):
        imgs = dict(corpus)
        hu_a = hu_moments(to_grayscale(imgs["blobs"]))
        hu_b = hu_moments(to_grayscale(imgs["blobs_shift"]))
        _require_close(hu_b, hu_a, rel=1e-6, abs_floor=HU_ABS_FLOOR)

    def test_rotation_invariance(self, corpus):
        imgs = dict(corpus)
        g = to_grayscale(imgs["blobs"])
        _require_close(
            hu_moments(np.rot90(g).copy()), hu_moments(g), rel=1e-9, abs_floor=HU_ABS_FLOOR
        )

    def test_scale_invariance_blob(self):
        def blob(s: int) -> np.ndarray:
            img = np.zeros((48 * s, 48 * s), dtype=np.uint8)
            img[6 * s : 18 * s, 5 * s : 14 * s] = 220
            img[27 * s : 36 * s, 21 * s : 39 * s] = 160
            img[12 * s : 15 * s, 30 * s : 35 * s] = 255
            return img

        _require_close(hu_moments(blob(2)), hu_moments(blob(1)), rel=1e-3, abs_floor=1e-12)

    def test_scale_invariance_disk(self):
        small = to_grayscale(disk_frame((64, 64), (32.0, 32.0), 14.0, background=0))
        large = to_grayscale(disk_frame((128, 128), (64.0, 64.0), 28.0, background=0))
        _require_close(hu_moments(large), hu_moments(small), rel=1e-3, abs_floor=1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(FeatureError):
            hu_moments(np.zeros((8, 8), dtype=np.uint8))

    def test_requires_grayscale(self):
        with pytest.raises(FeatureError):
            hu_moments(np.full((8, 8, 3), 9, dtype=np.uint8))


class TestShapeSimilarity:
    def test_identical_image_hits_cap(self, corpus):
        img = dict(corpus)["blobs"]
        s = shape_similarity(img, img)
        assert abs(s - 23.025850929940457) <= 1e-9
        assert s == FeatureParams().max_shape_similarity

    def test_translated_reference_near_cap(self, corpus):
        imgs = dict(corpus)
        s = shape_similarity(imgs["blobs_shift"], imgs["blobs"])
        assert abs(s - 23.025850929940457) <= 1e-3

    def test_hand_computed_distance(self):
        hu_ref = np.array([0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        hu_img = np.array([0.3, -0.05, 0.0, 0.0, 0.0, 0.0, 0.0])
        d = abs(0.1 - 0.3) + abs(0.0 - -0.05)
        assert hu_distance_score(hu_ref, hu_img, 1e-10) == -math.log(d + 1e-10)

    def test_larger_distance_scores_lower(self, corpus):
        imgs = dict(corpus)
        near = shape_similarity(imgs["disk_center"], imgs["disk_center"])
        far = shape_similarity(imgs["checker_4"], imgs["disk_center"])
        assert far < near


class TestExtractFeatures:
    def test_self_reference(self, corpus):
        img = dict(corpus)["drift_0"]
        profile = build_reference_profile(img)
        fv = extract_features(img, profile)
        assert fv.color_similarity == 1.0
        assert abs(fv.shape_similarity - 23.025850929940457) <= 1e-9

    def test_constant_mid_gray(self):
        img = np.full((16, 16), 128, dtype=np.uint8)
        profile = build_reference_profile(np.full((16, 16), 200, dtype=np.uint8))
        fv = extract_features(img, profile)
        assert fv.brightness == 128 / 255
        assert fv.contrast == 0.0
        assert fv.edge_density == 0.0

    def test_ranges_hold_across_corpus(self, corpus):
        imgs = dict(corpus)
        profile = build_reference_profile(imgs["drift_0"])
        p = FeatureParams()
        for name, img in corpus:
            if not to_grayscale(img).any():
                continue  # all-zero frames have undefined moments
            fv = extract_features(img, profile, p)
            assert 0.0 <= fv.brightness <= 1.0, name
            assert 0.0 <= fv.contrast <= 1.0, name
            assert 0.0 <= fv.edge_density <= 1.0, name
            assert -1.0 <= fv.color_similarity <= 1.0, name
            assert fv.shape_similarity <= p.max_shape_similarity + 1e-9, name

    def test_as_tuple_order(self):
        fv = FeatureVector(0.1, 0.2, 0.3, 0.4, 0.5)
        assert fv.as_tuple() == (0.1, 0.2, 0.3, 0.4, 0.5)


class TestCompositeScore:
    def test_all_ones_unit_weights(self):
        fv = FeatureVector(1.0, 1.0, 1.0, 1.0, 1.0)
        assert composite_score(fv, WeightConfig()) == 1.0

    def test_single_weight_is_identity(self):
        fv = FeatureVector(0.37, 0.9, 0.1, -0.5, 11.0)
        w = WeightConfig(1.0, 0.0, 0.0, 0.0, 0.0)
        assert composite_score(fv, w) == fv.brightness

    def test_hand_summed_example(self):
        fv = FeatureVector(0.5, 0.25, 0.0, 1.0, 23.0259)
        got = composite_score(fv, WeightConfig())
        want = 0.2 * 0.5 + 0.2 * 0.25 + 0.2 * 0.0 + 0.2 * 1.0 + 0.2 * 23.0259
        assert got == want
        assert abs(got - 4.95518) <= 1e-12

    def test_weight_scaling_scales_score(self):
        fv = FeatureVector(0.5, 0.25, 0.125, -0.5, 7.0)
        base = composite_score(fv, WeightConfig())
        doubled = composite_score(fv, WeightConfig().scaled(2.0))
        assert abs(doubled - 2.0 * base) <= 1e-12

    def test_weight_validation(self):
        with pytest.raises(ValueError):
            WeightConfig(0.0, 0.0, 0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            WeightConfig(math.nan, 0.2, 0.2, 0.2, 0.2)
        with pytest.raises(ValueError):
            WeightConfig(math.inf, 0.2, 0.2, 0.2, 0.2)
