"""Order-0/1/2 scattering coefficients in three variants.

The scattering propagator cascades wavelet convolution and complex
modulus along paths of strictly increasing scales; coefficients are then
pooled either globally (spatial mean), locally (convolution with the
low-pass, subsampled with stride 2^J), or globally with an additional
mean over all angle tuples (rotation-invariant variant).

All convolutions are circular, computed in the Fourier domain at full
N x N resolution; subsampling happens only at the final averaging stage.
The order-0 coefficient (low-passed input) is always included.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import InvalidConfigError, NonFiniteInputError, SizeMismatchError
from .filterbank import FilterBank, FilterBankConfig

VARIANT_WINDOWED = "windowed"
VARIANT_GLOBAL = "global"
VARIANT_ROTINV = "global_rotation_invariant"
VARIANTS = (VARIANT_WINDOWED, VARIANT_GLOBAL, VARIANT_ROTINV)


@dataclass(frozen=True)
class Path:
    """A scattering path: (scale, angle) steps with strictly increasing
    scales.  Rotation-invariant paths carry scales only (angles=None)."""

    scales: tuple
    angles: tuple | None = None

    def __post_init__(self):
        if self.angles is not None and len(self.angles) != len(self.scales):
            raise InvalidConfigError("angles and scales must have equal length")
        if any(b <= a for a, b in zip(self.scales, self.scales[1:])):
            raise InvalidConfigError(f"path scales must strictly increase: {self.scales}")

    @property
    def order(self) -> int:
        return len(self.scales)


@dataclass(frozen=True)
class ScatteringConfig:
    """Scattering variant, maximum order and the underlying bank config."""

    bank: FilterBankConfig
    max_order: int = 2
    variant: str = VARIANT_GLOBAL

    def validate(self):
        self.bank.validate()
        if not 0 <= self.max_order <= 2:
            raise InvalidConfigError(
                f"max_order must be 0, 1 or 2, got {self.max_order}")
        if self.variant not in VARIANTS:
            raise InvalidConfigError(
                f"variant must be one of {VARIANTS}, got {self.variant!r}")

    @property
    def rotation_invariant(self) -> bool:
        return self.variant == VARIANT_ROTINV

    @property
    def spatial_cells(self) -> int:
        if self.variant == VARIANT_WINDOWED:
            return (self.bank.image_size // 2 ** self.bank.num_scales) ** 2
        return 1

    def cache_key(self) -> str:
        return f"{self.bank.cache_key()};M={self.max_order};variant={self.variant}"


@dataclass(frozen=True)
class FeatureVector:
    """Flat scattering feature vector with its path/cell layout.

    ``layout[i]`` is (channel, path, cell); ``path`` is None for the
    order-0 block and ``cell`` is None for global variants.
    """

    values: np.ndarray
    layout: tuple
    channel_count: int

    def __len__(self):
        return len(self.values)


def enumerate_paths(num_scales, num_angles, max_order,
                    rotation_invariant=False):
    """All admissible order >= 1 paths in lexicographic order.

    Ordered by path length, then scales, then angles; angle-free when
    ``rotation_invariant``.  The order-0 coefficient is not a path.
    """
    if max_order > 2:
        raise InvalidConfigError(f"max_order must be <= 2, got {max_order}")
    paths = []
    for order in range(1, max_order + 1):
        for scales in combinations(range(num_scales), order):
            if rotation_invariant:
                paths.append(Path(scales=scales))
            else:
                for angles in product(range(num_angles), repeat=order):
                    paths.append(Path(scales=scales, angles=angles))
    return paths


def count_features(cfg: ScatteringConfig, channels=1):
    """Closed-form output dimension: C * (1 + #paths) * spatial cells."""
    cfg.validate()
    if channels < 1:
        raise InvalidConfigError(f"channels must be >= 1, got {channels}")
    num_paths = len(enumerate_paths(cfg.bank.num_scales, cfg.bank.num_angles,
                                    cfg.max_order, cfg.rotation_invariant))
    return channels * (1 + num_paths) * cfg.spatial_cells


def _as_channels(image, n):
    """Validate an image and view it as (C, N, N) float64."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[-2:] != (n, n):
        raise SizeMismatchError(
            f"expected image of shape (C, {n}, {n}) or ({n}, {n}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteInputError("image contains non-finite values")
    return arr


def _pool(field, bank, windowed):
    """Average a nonnegative field: spatial mean, or phi-conv + stride 2^J."""
    if not windowed:
        return np.array([field.mean()])
    stride = 2 ** bank.num_scales
    smoothed = np.fft.ifft2(np.fft.fft2(field) * bank.phi_hat).real
    # the field is nonnegative; clip rounding noise from the smoothing
    return np.maximum(smoothed[::stride, ::stride], 0.0).ravel()


def _scatter_channel(channel, bank, cfg):
    """Scattering outputs for one channel, keyed per path."""
    windowed = cfg.variant == VARIANT_WINDOWED
    j_count, l_count = bank.num_scales, bank.num_angles
    fhat = np.fft.fft2(channel)

    if windowed:
        stride = 2 ** bank.num_scales
        order0 = np.fft.ifft2(fhat * bank.phi_hat).real[::stride, ::stride].ravel()
    else:
        order0 = np.array([channel.mean()])

    # u1[j1][l1]: first-order propagator at full resolution
    u1 = []
    s1 = {}
    for j1 in range(j_count):
        u = np.abs(np.fft.ifft2(fhat[None] * bank.psi_hat[j1], axes=(-2, -1)))
        u1.append(u)
        if cfg.max_order >= 1:
            for l1 in range(l_count):
                s1[(j1, l1)] = _pool(u[l1], bank, windowed)

    s2 = {}
    if cfg.max_order >= 2:
        for j1 in range(j_count):
            for l1 in range(l_count):
                uhat = np.fft.fft2(u1[j1][l1])
                for j2 in range(j1 + 1, j_count):
                    u2 = np.abs(np.fft.ifft2(uhat[None] * bank.psi_hat[j2],
                                             axes=(-2, -1)))
                    for l2 in range(l_count):
                        s2[(j1, l1, j2, l2)] = _pool(u2[l2], bank, windowed)
    return order0, s1, s2


def _assemble(order0, s1, s2, cfg, l_count, paths):
    blocks = [order0]
    for path in paths:
        if path.order == 1:
            (j1,) = path.scales
            if cfg.rotation_invariant:
                block = np.mean([s1[(j1, l1)] for l1 in range(l_count)], axis=0)
            else:
                block = s1[(j1, path.angles[0])]
        else:
            j1, j2 = path.scales
            if cfg.rotation_invariant:
                block = np.mean([s2[(j1, l1, j2, l2)]
                                 for l1 in range(l_count)
                                 for l2 in range(l_count)], axis=0)
            else:
                l1, l2 = path.angles
                block = s2[(j1, l1, j2, l2)]
        blocks.append(block)
    return np.concatenate(blocks)


def scatter(image, bank: FilterBank, cfg: ScatteringConfig) -> FeatureVector:
    """Scattering feature vector of one image.

    Parameters
    ----------
    image : array, shape (N, N) or (C, N, N)
        Real-valued input matching the bank's grid.
    bank : FilterBank
    cfg : ScatteringConfig
        Must wrap the same FilterBankConfig the bank was built from.

    Returns
    -------
    FeatureVector
        Per-channel blocks concatenated; within each channel the order-0
        block comes first, then paths in ``enumerate_paths`` order, each
        contributing one value (global variants) or (N/2^J)^2 cells.
    """
    cfg.validate()
    if cfg.bank != bank.config:
        raise InvalidConfigError("scattering config does not match the filter bank")
    channels = _as_channels(image, bank.image_size)
    paths = enumerate_paths(bank.num_scales, bank.num_angles, cfg.max_order,
                            cfg.rotation_invariant)

    values = np.concatenate([
        _assemble(*_scatter_channel(ch, bank, cfg), cfg, bank.num_angles, paths)
        for ch in channels])

    cells = cfg.spatial_cells
    windowed = cfg.variant == VARIANT_WINDOWED
    layout = []
    for c in range(channels.shape[0]):
        for path in (None, *paths):
            for cell in range(cells):
                layout.append((c, path, cell if windowed else None))
    values.setflags(write=False)
    return FeatureVector(values=values, layout=tuple(layout),
                         channel_count=channels.shape[0])


def scatter_batch(images, bank, cfg, n_jobs=1):
    """Map ``scatter`` over a list of images, preserving order.

    Per-image computations are independent, so results are identical to a
    sequential loop for any ``n_jobs``.  Errors are re-raised with the
    offending index.
    """
    def one(item):
        idx, image = item
        try:
            return scatter(image, bank, cfg)
        except (SizeMismatchError, NonFiniteInputError) as exc:
            raise type(exc)(f"image {idx}: {exc}") from exc

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(one, enumerate(images)))
    return [one(item) for item in enumerate(images)]


def stack_features(feature_vectors):
    """Stack FeatureVectors into an (n, D) float64 matrix."""
    if not feature_vectors:
        return np.empty((0, 0))
    return np.stack([fv.values for fv in feature_vectors])
