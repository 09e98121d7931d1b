"""The defining properties of scattering features, measured.

Demonstrates on concrete images what makes the representation a sound
basis for regression: exact invariance to circular shifts, rotation
invariance of the angle-averaged variant, stability to additive noise and
to small smooth deformations, and the instability of the Fourier-modulus
alternative that the scattering cascade avoids.

Run:  python demos/02_scattering_invariances.py
"""

import numpy as np
from scipy.ndimage import gaussian_filter, map_coordinates

from scatgp import (FilterBankConfig, ScatteringConfig, build_filterbank,
                    scatter)

N = 32
rng = np.random.default_rng(0)

bank_cfg = FilterBankConfig(N, 4, 8)
bank = build_filterbank(bank_cfg)
cfg = ScatteringConfig(bank_cfg, max_order=2, variant="global")

image = gaussian_filter(rng.standard_normal((N, N)), 1.5, mode="wrap")
image /= np.sqrt(np.mean(image ** 2))
ref = scatter(image, bank, cfg).values
print(f"feature dimension (global, J=4, L=8, order 2): {ref.size}")
print()

print("=== Translation invariance (exact for circular shifts) ===")
shifted = np.roll(np.roll(image, 5, axis=0), 9, axis=1)
delta = np.linalg.norm(scatter(shifted, bank, cfg).values - ref)
print(f"  relative feature change under a (5, 9) shift: "
      f"{delta / np.linalg.norm(ref):.2e}")
print()

print("=== Rotation invariance (angle-averaged variant) ===")
ri_cfg = ScatteringConfig(FilterBankConfig(N, 3, 8), 2,
                          "global_rotation_invariant")
ri_bank = build_filterbank(ri_cfg.bank)
ri_ref = scatter(image, ri_bank, ri_cfg).values
ri_rot = scatter(np.rot90(image), ri_bank, ri_cfg).values
print(f"  relative change under a 90-degree rotation: "
      f"{np.linalg.norm(ri_rot - ri_ref) / np.linalg.norm(ri_ref):.2e}")
print()

print("=== Noise stability (Lipschitz constant sqrt(lp_max) = 1) ===")
for noise_scale in (0.05, 0.2, 0.8):
    noise = noise_scale * rng.standard_normal((N, N))
    delta = np.linalg.norm(scatter(image + noise, bank, cfg).values - ref)
    bound = np.sqrt(np.mean(noise ** 2))
    print(f"  ||noise||={bound:.3f}: feature change {delta:.4f} "
          f"({delta / bound:.2f} of the bound)")
print()

print("=== Deformation stability ===")
field = np.array([gaussian_filter(rng.standard_normal((N, N)), 4, mode="wrap")
                  for _ in range(2)])
field *= 2.0 / np.abs(field).max()
ii, jj = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
for t in (0.5, 0.25, 0.125):
    coords = np.array([ii + t * field[0], jj + t * field[1]])
    warped = map_coordinates(image, coords, order=1, mode="grid-wrap")
    delta = np.linalg.norm(scatter(warped, bank, cfg).values - ref)
    print(f"  t={t:5.3f}: ||dPhi|| = {delta:.5f}   ratio to t: {delta / t:.4f}")
print("The change shrinks proportionally with the deformation size.")
print()

print("=== Why not just |FFT|? (the classic counterexample) ===")
c = (N - 1) / 2.0
xi = 2.0 * np.pi * 12 / N


def stretched_gabor(t):
    sx, sy = 1.0 - t, 1.0 / (1.0 - t)
    env = np.exp(-((sx * (ii - c)) ** 2 + (sy * (jj - c)) ** 2) / (2 * 6.0 ** 2))
    return np.cos(xi * sx * (ii - c)) * env


base = stretched_gabor(0.0)
base_s = scatter(base, bank, cfg).values
base_f = np.abs(np.fft.fft2(base)).ravel() / N ** 2
norm0 = np.sqrt(np.mean(base ** 2))
print("  area-preserving stretch of a fine-scale texture:")
for t in (0.5, 0.25, 0.125):
    warped = stretched_gabor(t)
    r_scat = np.linalg.norm(scatter(warped, bank, cfg).values - base_s) / (norm0 * t)
    r_four = np.linalg.norm(np.abs(np.fft.fft2(warped)).ravel() / N ** 2
                            - base_f) / (norm0 * t)
    print(f"  t={t:5.3f}: scattering ratio {r_scat:.2f}   "
          f"Fourier-modulus ratio {r_four:.2f}")
print("The Fourier-modulus ratio blows up as the deformation shrinks;")
print("scattering's stays bounded. That gap is the whole point.")
