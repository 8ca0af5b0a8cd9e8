import numpy as np
import pytest

from texdesign.dimred import DiscriminantProjection


def _blobs(rng, centers, n_per, scale=0.3):
    xs, ys = [], []
    for label, center in enumerate(centers):
        xs.append(rng.normal(loc=center, scale=scale, size=(n_per, len(center))))
        ys.append(np.full(n_per, label))
    return np.vstack(xs), np.concatenate(ys)


class TestFit:
    def test_two_blob_axis(self, rng):
        x, y = _blobs(rng, [(-5.0, 0.0), (5.0, 0.0)], 30)
        proj = DiscriminantProjection.fit(x, y, 1)
        axis = proj.components[0]
        angle = np.degrees(np.arccos(abs(axis[0]) / np.linalg.norm(axis)))
        assert angle < 5.0

    def test_three_class_centroids_distinct(self, rng):
        x, y = _blobs(rng, [(0.0, 0.0, 0.0), (4.0, 0.0, 1.0), (0.0, 4.0, -1.0)], 20)
        proj = DiscriminantProjection.fit(x, y, 2)
        z = proj.transform(x)
        cents = np.array([z[y == c].mean(axis=0) for c in np.unique(y)])
        dists = [np.linalg.norm(cents[i] - cents[j])
                 for i in range(3) for j in range(i + 1, 3)]
        assert min(dists) > 0.0

    def test_rejects_dout_at_class_count(self, rng):
        x, y = _blobs(rng, [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)], 5)
        with pytest.raises(ValueError):
            DiscriminantProjection.fit(x, y, 3)

    def test_rejects_too_few_samples(self):
        x = np.eye(3)
        y = np.array([0, 1, 2])
        with pytest.raises(ValueError):
            DiscriminantProjection.fit(x, y, 2)

    def test_rows_unit_norm_sign_fixed(self, rng):
        x, y = _blobs(rng, [(0.0, 0.0, 0.0), (3.0, 1.0, 0.0), (0.0, 3.0, 2.0)], 15)
        proj = DiscriminantProjection.fit(x, y, 2)
        norms = np.linalg.norm(proj.components, axis=1)
        np.testing.assert_allclose(norms, 1.0, atol=1e-12)
        for row in proj.components:
            nz = row[np.abs(row) > 1e-12]
            assert nz[0] > 0

    def test_deterministic(self, rng):
        x, y = _blobs(rng, [(0.0, 0.0), (2.0, 1.0), (1.0, 3.0)], 10)
        a = DiscriminantProjection.fit(x, y, 2)
        b = DiscriminantProjection.fit(x, y, 2)
        assert np.array_equal(a.components, b.components)


class TestTransform:
    def test_linearity(self, rng):
        x, y = _blobs(rng, [(0.0, 0.0), (3.0, 0.0), (0.0, 3.0)], 10)
        proj = DiscriminantProjection.fit(x, y, 2)
        v = rng.normal(size=(4, 2))
        np.testing.assert_allclose(proj.transform(2.0 * v),
                                   2.0 * proj.transform(v), atol=1e-12)
        assert np.array_equal(proj.transform(np.zeros((1, 2))), np.zeros((1, 2)))

    def test_output_columns(self, rng):
        x, y = _blobs(rng, [(0.0,) * 5, (2.0,) * 5, (4.0,) * 5], 10)
        proj = DiscriminantProjection.fit(x, y, 2)
        assert proj.transform(x).shape == (30, 2)
