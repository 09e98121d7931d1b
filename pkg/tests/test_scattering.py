from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import feature_norm, rms, smooth_displacement, smooth_image, warp_image
from scatgp.errors import (InvalidConfigError, NonFiniteInputError,
                           SizeMismatchError)
from scatgp.filterbank import FilterBankConfig, build_filterbank
from scatgp.scattering import (VARIANT_GLOBAL, VARIANT_ROTINV, VARIANT_WINDOWED,
                               Path, ScatteringConfig, count_features,
                               enumerate_paths, scatter, scatter_batch,
                               stack_features)


def brute_force_paths(num_scales, num_angles, max_order, rotation_invariant):
    """Exhaustive enumeration oracle: generate-and-filter over all tuples."""
    found = []
    for order in range(1, max_order + 1):
        for scales in product(range(num_scales), repeat=order):
            if any(b <= a for a, b in zip(scales, scales[1:])):
                continue
            if rotation_invariant:
                found.append((scales, None))
            else:
                for angles in product(range(num_angles), repeat=order):
                    found.append((scales, angles))
    return found


class TestPaths:
    def test_flagship_counts(self):
        paths = enumerate_paths(3, 8, 2)
        assert sum(p.order == 1 for p in paths) == 24
        assert sum(p.order == 2 for p in paths) == 192
        assert len(paths) == 216

    def test_rotation_invariant_counts(self):
        assert len(enumerate_paths(3, 8, 2, rotation_invariant=True)) == 6

    def test_no_second_order_with_single_scale(self):
        paths = enumerate_paths(1, 1, 2)
        assert len(paths) == 1 and paths[0].order == 1

    @given(j=st.integers(1, 6), l=st.sampled_from([1, 4, 8]),
           m=st.integers(0, 2), rotinv=st.booleans())
    @settings(max_examples=40, deadline=None)
    def test_matches_brute_force(self, j, l, m, rotinv):
        paths = enumerate_paths(j, l, m, rotinv)
        oracle = brute_force_paths(j, l, m, rotinv)
        assert [(p.scales, p.angles) for p in paths] == oracle

    def test_closed_form_count(self):
        from math import comb

        for j, l in product(range(1, 7), (4, 8)):
            n1 = sum(p.order == 1 for p in enumerate_paths(j, l, 2))
            n2 = sum(p.order == 2 for p in enumerate_paths(j, l, 2))
            assert n1 == l * comb(j, 1)
            assert n2 == l ** 2 * comb(j, 2)

    def test_scale_ordering_enforced(self):
        with pytest.raises(InvalidConfigError):
            Path(scales=(2, 1), angles=(0, 0))


class TestCounts:
    def test_windowed(self):
        cfg = ScatteringConfig(FilterBankConfig(32, 3, 8), 2, VARIANT_WINDOWED)
        assert count_features(cfg) == 3472

    def test_global_multichannel(self):
        cfg = ScatteringConfig(FilterBankConfig(32, 3, 8), 2, VARIANT_GLOBAL)
        assert count_features(cfg, channels=3) == 651

    def test_rotinv(self):
        cfg = ScatteringConfig(FilterBankConfig(32, 3, 8), 2, VARIANT_ROTINV)
        assert count_features(cfg) == 7

    @pytest.mark.parametrize("variant,channels", [
        (VARIANT_WINDOWED, 1), (VARIANT_GLOBAL, 3), (VARIANT_ROTINV, 1)])
    def test_count_matches_actual_output(self, bank_32_3_8, variant, channels, rng):
        cfg = ScatteringConfig(bank_32_3_8.config, 2, variant)
        image = rng.standard_normal((channels, 32, 32))
        fv = scatter(image, bank_32_3_8, cfg)
        assert len(fv) == count_features(cfg, channels=channels)
        assert len(fv.layout) == len(fv)
        assert fv.channel_count == channels


class TestScatter:
    def test_constant_image(self, bank_32_3_8, global_cfg_32_3_8):
        c = 3.7
        fv = scatter(np.full((32, 32), c), bank_32_3_8, global_cfg_32_3_8)
        assert fv.values[0] == pytest.approx(c, rel=1e-12)
        assert np.abs(fv.values[1:]).max() <= 1e-10 * abs(c)

    def test_constant_image_windowed(self, bank_32_3_8, windowed_cfg_32_3_8):
        c = -1.25
        fv = scatter(np.full((32, 32), c), bank_32_3_8, windowed_cfg_32_3_8)
        order0 = fv.values[:windowed_cfg_32_3_8.spatial_cells]
        np.testing.assert_allclose(order0, c, rtol=1e-12)

    def test_shift_invariance_global(self, bank_32_3_8, global_cfg_32_3_8, rng):
        for _ in range(5):
            image = rng.standard_normal((32, 32))
            ref = scatter(image, bank_32_3_8, global_cfg_32_3_8).values
            moved = scatter(np.roll(np.roll(image, 5, 0), 9, 1),
                            bank_32_3_8, global_cfg_32_3_8).values
            assert np.linalg.norm(moved - ref) <= 1e-8 * np.linalg.norm(ref)

    def test_rot90_invariance_rotinv(self, bank_32_3_8, rotinv_cfg_32_3_8, rng):
        image = rng.standard_normal((32, 32))
        ref = scatter(image, bank_32_3_8, rotinv_cfg_32_3_8).values
        rot = scatter(np.rot90(image), bank_32_3_8, rotinv_cfg_32_3_8).values
        assert np.linalg.norm(rot - ref) <= 1e-6 * np.linalg.norm(ref)

    def test_rot90_invariance_rotinv_l2(self, rng):
        # pi/L equals the grid-exact 90 degrees when L = 2
        bank = build_filterbank(FilterBankConfig(32, 3, 2))
        cfg = ScatteringConfig(bank.config, 2, VARIANT_ROTINV)
        image = rng.standard_normal((32, 32))
        ref = scatter(image, bank, cfg).values
        rot = scatter(np.rot90(image), bank, cfg).values
        assert np.linalg.norm(rot - ref) <= 1e-6 * np.linalg.norm(ref)

    def test_order_ge_1_nonnegative_and_finite(self, bank_32_3_8, rng):
        for variant in (VARIANT_GLOBAL, VARIANT_WINDOWED, VARIANT_ROTINV):
            cfg = ScatteringConfig(bank_32_3_8.config, 2, variant)
            fv = scatter(rng.standard_normal((32, 32)), bank_32_3_8, cfg)
            assert np.all(np.isfinite(fv.values))
            order0_len = cfg.spatial_cells
            assert np.all(fv.values[order0_len:] >= 0.0)

    def test_multichannel_is_concatenation(self, bank_32_3_8, global_cfg_32_3_8, rng):
        image = rng.standard_normal((3, 32, 32))
        fv = scatter(image, bank_32_3_8, global_cfg_32_3_8)
        parts = [scatter(image[c], bank_32_3_8, global_cfg_32_3_8).values
                 for c in range(3)]
        np.testing.assert_array_equal(fv.values, np.concatenate(parts))

    def test_size_mismatch(self, bank_32_3_8, global_cfg_32_3_8):
        with pytest.raises(SizeMismatchError):
            scatter(np.zeros((16, 16)), bank_32_3_8, global_cfg_32_3_8)

    def test_non_finite(self, bank_32_3_8, global_cfg_32_3_8):
        bad = np.zeros((32, 32))
        bad[3, 3] = np.nan
        with pytest.raises(NonFiniteInputError):
            scatter(bad, bank_32_3_8, global_cfg_32_3_8)

    def test_config_bank_mismatch(self, bank_32_3_8):
        cfg = ScatteringConfig(FilterBankConfig(32, 4, 8), 2, VARIANT_GLOBAL)
        with pytest.raises(InvalidConfigError):
            scatter(np.zeros((32, 32)), bank_32_3_8, cfg)


class TestBatch:
    def test_empty(self, bank_32_3_8, global_cfg_32_3_8):
        assert scatter_batch([], bank_32_3_8, global_cfg_32_3_8) == []
        assert stack_features([]).shape == (0, 0)

    def test_singleton(self, bank_32_3_8, global_cfg_32_3_8, rng):
        image = rng.standard_normal((32, 32))
        batch = scatter_batch([image], bank_32_3_8, global_cfg_32_3_8)
        direct = scatter(image, bank_32_3_8, global_cfg_32_3_8)
        np.testing.assert_array_equal(batch[0].values, direct.values)

    def test_batch_equals_sequential_loop(self, bank_32_3_8, global_cfg_32_3_8, rng):
        images = [rng.standard_normal((32, 32)) for _ in range(16)]
        sequential = [scatter(im, bank_32_3_8, global_cfg_32_3_8).values
                      for im in images]
        for n_jobs in (1, 4):
            batch = scatter_batch(images, bank_32_3_8, global_cfg_32_3_8,
                                  n_jobs=n_jobs)
            for got, want in zip(batch, sequential):
                np.testing.assert_array_equal(got.values, want)

    def test_error_carries_index(self, bank_32_3_8, global_cfg_32_3_8, rng):
        images = [rng.standard_normal((32, 32)), np.full((32, 32), np.nan)]
        with pytest.raises(NonFiniteInputError, match="image 1"):
            scatter_batch(images, bank_32_3_8, global_cfg_32_3_8)


class TestStability:
    def test_windowed_local_translation(self, rng):
        # shifts up to 2 pixels with J = log2(N) - 1
        bank = build_filterbank(FilterBankConfig(32, 4, 8))
        cfg = ScatteringConfig(bank.config, 2, VARIANT_WINDOWED)
        image = smooth_image(rng, 32, smoothness=2.0)
        ref = scatter(image, bank, cfg).values
        for shift in ((1, 0), (0, 2), (1, 1), (2, 0)):
            moved = scatter(np.roll(np.roll(image, shift[0], 0), shift[1], 1),
                            bank, cfg).values
            rel = np.linalg.norm(moved - ref) / np.linalg.norm(ref)
            assert rel <= 0.15, f"shift {shift}: {rel:.3f}"

    def test_noise_stability_bound(self, bank_32_3_8, global_cfg_32_3_8, rng):
        bound = np.sqrt(bank_32_3_8.lp_max)
        for _ in range(5):
            image = smooth_image(rng, 32)
            noise = 0.2 * rng.standard_normal((32, 32))
            delta = (scatter(image + noise, bank_32_3_8, global_cfg_32_3_8).values
                     - scatter(image, bank_32_3_8, global_cfg_32_3_8).values)
            assert np.linalg.norm(delta) <= bound * rms(noise) * (1 + 1e-9)

    def test_deformation_stability(self, bank_32_3_8, global_cfg_32_3_8, rng):
        image = smooth_image(rng, 32)
        disp = smooth_displacement(rng, 32)
        ref = scatter(image, bank_32_3_8, global_cfg_32_3_8).values
        numerators = []
        for t in (0.5, 0.25, 0.125):
            warped = warp_image(image, disp, t)
            num = np.linalg.norm(
                scatter(warped, bank_32_3_8, global_cfg_32_3_8).values - ref)
            numerators.append(num)
            assert num / (rms(image) * t) <= 1.0  # bounded, no blow-up
        for larger, smaller in zip(numerators, numerators[1:]):
            assert smaller <= 0.5 * larger * 1.3  # halving t at least halves it
