"""Feature post-processing: per-dimension standardization and PCA.

Both transforms are fitted on training features only and are immutable
afterwards.  The default pipeline is standardization without PCA; PCA is
exposed for ablations (a full-variance projection is an isometry, so it
leaves isotropic-kernel Gram matrices unchanged).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, SizeMismatchError

SCALE_FLOOR = 1e-12


@dataclass(frozen=True)
class FeatureStandardizer:
    """Per-dimension z-scoring fitted on training data."""

    mean: np.ndarray
    scale: np.ndarray  # population std, clamped at SCALE_FLOOR

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def transform(self, features):
        features = _as_matrix(features, self.dim)
        return (features - self.mean) / self.scale

    def inverse_transform(self, standardized):
        standardized = _as_matrix(standardized, self.dim)
        return standardized * self.scale + self.mean


@dataclass(frozen=True)
class PCAProjector:
    """Centering plus projection onto the leading principal axes.

    ``basis`` holds orthonormal component rows; ``explained_variance``
    holds the per-component variance fractions (nonincreasing).
    """

    center: np.ndarray
    basis: np.ndarray  # (k, D)
    explained_variance: np.ndarray
    retain: float

    @property
    def n_components(self) -> int:
        return self.basis.shape[0]

    def project(self, features):
        features = _as_matrix(features, self.center.shape[0])
        return (features - self.center) @ self.basis.T

    def reconstruct(self, projected):
        projected = _as_matrix(projected, self.n_components)
        return projected @ self.basis + self.center


def _as_matrix(features, dim=None):
    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None]
    if arr.ndim != 2:
        raise SizeMismatchError(f"expected a 2D feature matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise SizeMismatchError(
            f"feature dimension mismatch: expected {dim}, got {arr.shape[1]}")
    return arr


def fit_standardizer(train_features) -> FeatureStandardizer:
    """Column means and population stds of the training matrix.

    Constant columns get their scale clamped to the floor, which maps them
    to zero under the transform.
    """
    train = _as_matrix(train_features)
    if train.shape[0] < 2:
        raise InvalidConfigError("standardizer needs at least 2 training rows")
    mean = train.mean(axis=0)
    scale = np.maximum(train.std(axis=0), SCALE_FLOOR)
    mean.setflags(write=False)
    scale.setflags(write=False)
    return FeatureStandardizer(mean=mean, scale=scale)


def pca_fit(train_features, retain=1.0) -> PCAProjector:
    """Principal components retaining a fraction of total variance.

    Parameters
    ----------
    train_features : (n, D) matrix, n >= 2
    retain : float in (0, 1]
        Smallest leading component count whose cumulative explained
        variance reaches this fraction is kept; ``retain=1`` keeps every
        component with nonzero variance (numerical rank).
    """
    train = _as_matrix(train_features)
    if train.shape[0] < 2:
        raise InvalidConfigError("PCA needs at least 2 training rows")
    if not 0.0 < retain <= 1.0:
        raise InvalidConfigError(f"retain must lie in (0, 1], got {retain}")

    center = train.mean(axis=0)
    _, svals, vt = np.linalg.svd(train - center, full_matrices=False)
    variances = svals ** 2
    total = variances.sum()
    if total <= 0.0:
        # degenerate all-constant data: keep one axis, zero variance
        fractions = np.zeros(1)
        basis = vt[:1]
    else:
        fractions = variances / total
        rank = int((svals > svals[0] * 1e-12).sum()) if svals.size else 0
        rank = max(rank, 1)
        cumulative = np.cumsum(fractions)
        k = int(np.searchsorted(cumulative, retain * (1.0 - 1e-12)) + 1)
        k = min(k, rank)
        basis = vt[:k]
        fractions = fractions[:k]
    basis = np.ascontiguousarray(basis)
    basis.setflags(write=False)
    center.setflags(write=False)
    fractions.setflags(write=False)
    return PCAProjector(center=center, basis=basis,
                        explained_variance=fractions, retain=retain)
