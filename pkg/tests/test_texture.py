import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_gray, random_quantized
from oracles import dist_stats_ref, fos_ref, glcm_ref, glds_ref, glrlm_ref
from texdesign.imageio import GrayImage, QuantizedImage, quantize
from texdesign.texture import (FEATURE_NAMES, Distribution1D, TextureParams,
                               adf_features, adf_from_spectrum, dist_stats,
                               extract_features, fos_features, glcm_features,
                               glds_features, glrlm_features, power_spectrum,
                               rdf_features, rdf_from_spectrum)
from texdesign.texture import _glrlm_direction_stats


def checkerboard(h, w, scale=1):
    grid = (np.indices((h, w)).sum(axis=0) % 2).astype(np.int16) * scale
    return grid


def quantized_checkerboard(h=4, w=4):
    return QuantizedImage(width=w, height=h, levels=4, data=checkerboard(h, w))


class TestDistStats:
    def test_point_mass(self):
        d = Distribution1D(support=np.array([3.0]), probs=np.array([1.0]))
        mean, contrast, var, skew, kurt, energy, entropy = dist_stats(d)
        assert mean == 3.0 and contrast == 9.0 and var == 0.0
        assert skew == 0.0 and kurt == 0.0
        assert energy == 1.0 and entropy == 0.0

    def test_symmetric_two_point(self):
        d = Distribution1D(support=np.array([0.0, 2.0]), probs=np.array([0.5, 0.5]))
        stats = dist_stats(d)
        assert stats[0] == 1.0  # mean
        assert stats[2] == 1.0  # variance
        assert stats[3] == 0.0  # symmetric: zero skew
        assert stats[4] == pytest.approx(-2.0)  # two-point excess kurtosis
        assert stats[5] == 0.5
        assert stats[6] == 1.0  # one bit

    def test_all_zero_distribution(self):
        d = Distribution1D(support=np.arange(3.0), probs=np.zeros(3))
        assert np.array_equal(dist_stats(d), np.zeros(7))

    def test_matches_reference_on_random(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 12))
            support = np.sort(rng.uniform(0, 10, n))
            support += np.arange(n) * 1e-6  # enforce strictly increasing
            raw = rng.uniform(0, 1, n)
            probs = raw / raw.sum()
            got = dist_stats(Distribution1D(support=support, probs=probs))
            want = dist_stats_ref(support, probs)
            np.testing.assert_allclose(got, want, atol=1e-9)

    @given(st.lists(st.floats(0.01, 100.0), min_size=1, max_size=20))
    @settings(max_examples=80, deadline=None)
    def test_bounds(self, weights):
        support = np.arange(len(weights), dtype=float)
        probs = np.array(weights) / sum(weights)
        stats = dist_stats(Distribution1D(support=support, probs=probs))
        assert stats[2] >= 0.0
        assert 0.0 < stats[5] <= 1.0
        assert -1e-12 <= stats[6] <= np.log2(len(weights)) + 1e-12

    def test_rejects_bad_distributions(self):
        with pytest.raises(ValueError):
            Distribution1D(support=np.array([1.0, 1.0]), probs=np.array([0.5, 0.5]))
        with pytest.raises(ValueError):
            Distribution1D(support=np.array([0.0, 1.0]), probs=np.array([0.9, 0.3]))
        with pytest.raises(ValueError):
            Distribution1D(support=np.array([0.0, 1.0]), probs=np.array([-0.1, 1.1]))


class TestFos:
    def test_constant_image(self):
        q = QuantizedImage(width=3, height=3, levels=4,
                           data=np.full((3, 3), 2, dtype=np.int16))
        stats = fos_features(q)
        assert stats[0] == 2.0 and stats[2] == 0.0
        assert stats[5] == 1.0 and stats[6] == 0.0

    def test_matches_oracle(self, rng):
        for _ in range(30):
            h, w = rng.integers(2, 12, size=2)
            levels = int(rng.choice([4, 16]))
            q = random_quantized(rng, h, w, levels)
            np.testing.assert_allclose(fos_features(q),
                                       fos_ref(q.data.tolist(), levels), atol=1e-9)


class TestGlds:
    def test_constant_image(self):
        q = QuantizedImage(width=4, height=4, levels=16,
                           data=np.full((4, 4), 5, dtype=np.int16))
        stats = glds_features(q, 1)
        assert stats[0] == 0.0 and stats[1] == 0.0
        assert stats[5] == 1.0 and stats[6] == 0.0

    def test_checkerboard_mean(self):
        stats = glds_features(quantized_checkerboard(), 1)
        # horizontal/vertical all-ones, diagonals all-zeros
        assert stats[0] == pytest.approx(0.5)

    def test_matches_oracle(self, rng):
        for _ in range(30):
            h, w = rng.integers(3, 12, size=2)
            levels = int(rng.choice([4, 16]))
            d = int(rng.integers(1, 3))
            q = random_quantized(rng, h, w, levels)
            np.testing.assert_allclose(glds_features(q, d),
                                       glds_ref(q.data.tolist(), levels, d), atol=1e-9)

    def test_image_too_small(self):
        q = QuantizedImage(width=2, height=2, levels=4,
                           data=np.zeros((2, 2), dtype=np.int16))
        with pytest.raises(ValueError):
            glds_features(q, 4)


class TestGlcm:
    def test_constant_image_degenerate_conventions(self):
        q = QuantizedImage(width=4, height=4, levels=16,
                           data=np.full((4, 4), 3, dtype=np.int16))
        contrast, corr, je, jent, idm, iv = glcm_features(q, 1)
        assert contrast == 0.0 and corr == 1.0 and je == 1.0
        assert jent == 0.0 and idm == 1.0 and iv == 0.0

    def test_checkerboard_contrast(self):
        stats = glcm_features(quantized_checkerboard(), 1)
        assert stats[0] == pytest.approx(0.5)

    def test_matches_oracle(self, rng):
        for _ in range(30):
            h, w = rng.integers(3, 12, size=2)
            levels = int(rng.choice([4, 16]))
            d = int(rng.integers(1, 3))
            q = random_quantized(rng, h, w, levels)
            np.testing.assert_allclose(glcm_features(q, d),
                                       glcm_ref(q.data.tolist(), levels, d), atol=1e-9)

    def test_translation_by_whole_period(self):
        # wrapping a periodic texture by its period leaves the statistics alone
        base = checkerboard(8, 8)
        rolled = np.roll(base, 2, axis=1)
        qa = QuantizedImage(width=8, height=8, levels=4, data=base)
        qb = QuantizedImage(width=8, height=8, levels=4, data=rolled)
        np.testing.assert_allclose(glcm_features(qa, 1), glcm_features(qb, 1),
                                   atol=1e-12)


class TestGlrlm:
    def test_constant_horizontal_runs(self):
        q = QuantizedImage(width=4, height=4, levels=16,
                           data=np.full((4, 4), 7, dtype=np.int16))
        sre, lre, gln, rln, rp = _glrlm_direction_stats(np.asarray(q.data), 0, 1)
        assert sre == pytest.approx(1 / 16)
        assert lre == pytest.approx(16.0)
        assert gln == pytest.approx(4.0)
        assert rln == pytest.approx(4.0)
        assert rp == pytest.approx(0.25)

    def test_checkerboard_maximal_fineness(self):
        data = checkerboard(4, 4)
        sre, lre, _, _, rp = _glrlm_direction_stats(data, 0, 1)
        assert sre == 1.0 and lre == 1.0 and rp == 1.0

    def test_matches_oracle(self, rng):
        for _ in range(30):
            h, w = rng.integers(2, 12, size=2)
            levels = int(rng.choice([4, 16]))
            q = random_quantized(rng, h, w, levels)
            np.testing.assert_allclose(glrlm_features(q),
                                       glrlm_ref(q.data.tolist()), atol=1e-9)


class TestPowerSpectrum:
    def test_constant_image_all_zero(self):
        img = GrayImage.from_array(np.full((6, 6), 9, dtype=np.uint8))
        assert np.allclose(power_spectrum(img), 0.0)

    def test_center_bin_zero(self, rng):
        img = random_gray(rng, 10, 14)
        spec = power_spectrum(img)
        peak = spec.max() if spec.max() > 0 else 1.0
        assert abs(spec[5, 7]) / peak < 1e-6

    def test_horizontal_cosine_concentrates(self):
        w, h, k = 32, 16, 5
        x = np.arange(w)
        row = 127.5 + 100 * np.cos(2 * np.pi * k * x / w)
        img = GrayImage.from_array(np.tile(np.round(row), (h, 1)).astype(np.uint8))
        spec = power_spectrum(img)
        cy, cx = h // 2, w // 2
        expected = {(cy, cx - k), (cy, cx + k)}
        flat = np.argsort(spec.ravel())[::-1][:2]
        got = {tuple(np.unravel_index(i, spec.shape)) for i in flat}
        assert got == expected
        assert spec[cy, cx - k] + spec[cy, cx + k] > 0.99 * spec.sum()

    def test_rejects_single_pixel(self):
        with pytest.raises(ValueError):
            power_spectrum(GrayImage.from_array(np.array([[5]], dtype=np.uint8)))


class TestAdfRdf:
    def test_zero_spectrum_zero_stats(self):
        img = GrayImage.from_array(np.full((8, 8), 3, dtype=np.uint8))
        assert np.array_equal(adf_features(img, 1), np.zeros(7))
        assert np.array_equal(rdf_features(img, 1), np.zeros(7))

    def test_masses_normalized(self, rng):
        img = random_gray(rng, 16, 16)
        spec = power_spectrum(img)
        for step in (1, 2, 3, 4):
            adf = adf_from_spectrum(spec, step)
            rdf = rdf_from_spectrum(spec, step)
            assert np.all(np.isfinite(adf)) and np.all(np.isfinite(rdf))
            assert adf[5] > 0.0 and rdf[5] > 0.0  # energy of a proper distribution

    def test_horizontal_grating_angle(self):
        # intensity varying along x -> frequency energy on the horizontal axis,
        # whose offsets have dy=0: atan2(0, dx) in {0, 180} -> bin at 0 degrees
        w, h = 32, 32
        x = np.arange(w)
        row = 127.5 + 100 * np.cos(2 * np.pi * 5 * x / w)
        img = GrayImage.from_array(np.tile(np.round(row), (h, 1)).astype(np.uint8))
        stats = adf_features(img, 1)
        assert stats[0] == pytest.approx(0.5, abs=1e-9)  # center of the first bin

    def test_rdf_mean_tracks_frequency(self):
        w = h = 32
        x = np.arange(w)
        means = []
        for k in (3, 10):
            row = 127.5 + 100 * np.cos(2 * np.pi * k * x / w)
            img = GrayImage.from_array(np.tile(np.round(row), (h, 1)).astype(np.uint8))
            means.append(rdf_features(img, 1)[0])
        assert means[0] < means[1]

    def test_rdf_bins_cover_min_half_dim(self, rng):
        img = random_gray(rng, 9, 15)
        spec = power_spectrum(img)
        stats = rdf_from_spectrum(spec, 3)  # r_max = 4 -> 2 bins of width 3
        assert np.all(np.isfinite(stats))

    def test_invalid_steps_rejected(self, rng):
        img = random_gray(rng, 8, 8)
        with pytest.raises(ValueError):
            adf_features(img, 5)
        with pytest.raises(ValueError):
            rdf_features(img, 0)


class TestExtractFeatures:
    def test_names_frozen_contract(self):
        assert len(FEATURE_NAMES) == 39
        assert FEATURE_NAMES[0] == "fos_mean"
        assert FEATURE_NAMES[7] == "glds_mean"
        assert FEATURE_NAMES[14] == "glcm_contrast"
        assert FEATURE_NAMES[20] == "glrlm_sre"
        assert FEATURE_NAMES[25] == "adf_mean"
        assert FEATURE_NAMES[32] == "rdf_mean"
        assert len(set(FEATURE_NAMES)) == 39

    def test_vector_composition(self, rng):
        img = random_gray(rng, 12, 12)
        params = TextureParams(fos_levels=16, glds_levels=4, glds_distance=2,
                               glcm_levels=16, glcm_distance=1, glrlm_levels=4,
                               adf_angle_step=2, rdf_radius_step=1)
        vec = extract_features(img, params)
        assert vec.shape == (39,)
        np.testing.assert_array_equal(vec[0:7], fos_features(quantize(img, 16)))
        np.testing.assert_array_equal(vec[7:14], glds_features(quantize(img, 4), 2))
        np.testing.assert_array_equal(vec[14:20], glcm_features(quantize(img, 16), 1))
        np.testing.assert_array_equal(vec[20:25], glrlm_features(quantize(img, 4)))
        np.testing.assert_array_equal(vec[25:32], adf_features(img, 2))
        np.testing.assert_array_equal(vec[32:39], rdf_features(img, 1))

    def test_params_validated(self):
        with pytest.raises(ValueError):
            TextureParams(fos_levels=3)
        with pytest.raises(ValueError):
            TextureParams(glds_distance=5)
        with pytest.raises(ValueError):
            TextureParams(adf_angle_step=0)
