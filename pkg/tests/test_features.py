import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scatgp.errors import InvalidConfigError
from scatgp.features import fit_standardizer, pca_fit
from scatgp.kernels import kernel_matrix, make_spec


class TestStandardizer:
    def test_two_point_example(self):
        std = fit_standardizer(np.array([[0.0], [2.0]]))
        assert std.mean[0] == 1.0
        assert std.scale[0] == 1.0

    def test_constant_column_clamped(self):
        x = np.column_stack([np.full(5, 7.0), np.arange(5.0)])
        std = fit_standardizer(x)
        assert std.scale[0] == 1e-12
        assert np.all(std.transform(x)[:, 0] == 0.0)

    def test_transformed_moments(self, rng):
        x = rng.standard_normal((100, 50)) * 3.0 + 1.0
        std = fit_standardizer(x)
        z = std.transform(x)
        assert np.abs(z.mean(axis=0)).max() <= 1e-10
        np.testing.assert_allclose(z.std(axis=0), 1.0, atol=1e-10)

    def test_too_few_rows(self):
        with pytest.raises(InvalidConfigError):
            fit_standardizer(np.zeros((1, 3)))

    @given(arrays(np.float64, (5, 3),
                  elements=st.floats(-1e6, 1e6, allow_nan=False)))
    @settings(max_examples=30, deadline=None)
    def test_round_trip(self, x):
        std = fit_standardizer(x)
        back = std.inverse_transform(std.transform(x))
        np.testing.assert_allclose(back, x, rtol=1e-12, atol=1e-9)


class TestPCA:
    def test_full_retention_reconstructs(self, rng):
        x = rng.standard_normal((40, 10))
        pca = pca_fit(x, retain=1.0)
        recon = pca.reconstruct(pca.project(x))
        assert np.linalg.norm(recon - x) <= 1e-8 * np.linalg.norm(x)

    def test_planar_data_needs_two_components(self, rng):
        basis = rng.standard_normal((2, 10))
        x = rng.standard_normal((60, 2)) @ basis
        pca = pca_fit(x, retain=0.99)
        assert pca.n_components == 2

    def test_basis_orthonormal(self, rng):
        pca = pca_fit(rng.standard_normal((30, 8)), retain=1.0)
        gram = pca.basis @ pca.basis.T
        np.testing.assert_allclose(gram, np.eye(pca.n_components), atol=1e-8)

    def test_explained_variance_shape(self, rng):
        pca = pca_fit(rng.standard_normal((30, 8)), retain=1.0)
        ev = pca.explained_variance
        assert np.all(np.diff(ev) <= 1e-12)
        assert ev.sum() <= 1.0 + 1e-8

    def test_full_retention_preserves_gram(self, rng):
        # rotation preserves pairwise distances, hence isotropic kernels
        x = rng.standard_normal((25, 6))
        pca = pca_fit(x, retain=1.0)
        centered = x - x.mean(axis=0)
        spec = make_spec("rbf", lengthscale=1.3)
        k_raw = kernel_matrix(spec, centered)
        k_pca = kernel_matrix(spec, pca.project(x))
        assert np.abs(k_raw - k_pca).max() <= 1e-8

    def test_pairwise_distance_isometry(self, rng):
        from scipy.spatial.distance import pdist

        x = rng.standard_normal((20, 7))
        pca = pca_fit(x, retain=1.0)
        d_raw = pdist(x - x.mean(axis=0))
        d_pca = pdist(pca.project(x))
        np.testing.assert_allclose(d_pca, d_raw, rtol=1e-8)

    def test_invalid_retain(self, rng):
        with pytest.raises(InvalidConfigError):
            pca_fit(rng.standard_normal((10, 3)), retain=0.0)
        with pytest.raises(InvalidConfigError):
            pca_fit(rng.standard_normal((10, 3)), retain=1.5)
