"""Shared test utilities: image warps and deformation fields.

Norm conventions used by the stability tests: images are measured by the
root-mean-square norm, feature vectors by the plain Euclidean norm for
global variants and by the cell-averaged norm (Euclidean over paths,
mean over spatial cells) for the windowed variant.  These match the
mean-normalized averaging of the scattering outputs.
"""

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates


def rms(image):
    return float(np.sqrt(np.mean(np.asarray(image) ** 2)))


def feature_norm(values, spatial_cells=1):
    return float(np.linalg.norm(values) / np.sqrt(spatial_cells))


def smooth_image(rng, n, smoothness=1.5):
    """Periodic smooth random image with unit rms."""
    img = gaussian_filter(rng.standard_normal((n, n)), smoothness, mode="wrap")
    return img / rms(img)


def smooth_displacement(rng, n, max_pixels=2.0, smoothness=4.0):
    """Smooth periodic displacement field scaled to a max magnitude."""
    field = np.array([gaussian_filter(rng.standard_normal((n, n)), smoothness,
                                      mode="wrap") for _ in range(2)])
    peak = np.abs(field).max()
    return field * (max_pixels / peak) if peak > 0 else field


def warp_image(image, displacement, t):
    """D_tau f with tau(x) = x + t * displacement(x), bilinear periodic."""
    n = image.shape[-1]
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    coords = np.array([ii + t * displacement[0], jj + t * displacement[1]])
    return map_coordinates(image, coords, order=1, mode="grid-wrap")


def gabor_stretch(n, t, frequency_bin=None, envelope_sigma=6.0):
    """Volume-preserving stretch of a fine-scale Gabor blob, analytic.

    Returns D_tau f for tau the stretch x -> ((1-t)x, y/(1-t)) applied to
    a Gabor whose carrier sits at the finest wavelet band center; t = 0
    gives the reference image.  Computing the warp in closed form keeps
    interpolation error out of the deformation comparison.
    """
    if frequency_bin is None:
        frequency_bin = 3 * n // 8  # 3pi/4, the finest band center
    xi = 2.0 * np.pi * frequency_bin / n
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    c = (n - 1) / 2.0
    sx, sy = 1.0 - t, 1.0 / (1.0 - t)
    envelope = np.exp(-((sx * (ii - c)) ** 2 + (sy * (jj - c)) ** 2)
                      / (2.0 * envelope_sigma ** 2))
    return np.cos(xi * sx * (ii - c)) * envelope


def fourier_modulus_features(image):
    """|FFT| scaled so the feature norm matches the image rms norm."""
    n = image.shape[-1]
    return np.abs(np.fft.fft2(image)).ravel() / n ** 2
