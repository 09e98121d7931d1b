import numpy as np
import pytest

from scatgp.datasets import (BlobParams, ChargeParams, ManifestRecord, SynthSpec,
                             blob_count_target, config_digest, coulomb_energy,
                             from_preset, load_image, read_cache, read_manifest,
                             render_blob_image, render_charge_image, save_image,
                             synth_generate, write_cache, write_dataset,
                             write_manifest)
from scatgp.errors import (ChecksumMismatchError, DigestMismatchError,
                           InvalidConfigError, ManifestError)


class TestBlobTask:
    def test_deterministic_generation(self):
        spec = from_preset("blob_count", "mild", seed=42)
        a = synth_generate(spec, 4, "train")
        b = synth_generate(spec, 4, "train")
        for (img1, t1), (img2, t2) in zip(a, b):
            np.testing.assert_array_equal(img1, img2)
            assert t1 == t2

    def test_target_is_recomputable_from_image(self):
        # the labeling rule is identical across splits: only p(X) shifts
        spec = from_preset("blob_count", "strong", seed=3)
        for split in ("train", "test"):
            for image, target in synth_generate(spec, 6, split):
                assert blob_count_target(image) == target

    def test_zero_blob_hook(self):
        rng = np.random.default_rng(0)
        image, target = render_blob_image(
            rng, BlobParams(background_amplitude=0.2), 32, blob_count=0)
        assert target == 0.0
        assert image.shape == (1, 32, 32)

    def test_shift_changes_image_distribution_only(self):
        spec = from_preset("blob_count", "strong", seed=5)
        train = synth_generate(spec, 30, "train")
        test = synth_generate(spec, 30, "test")
        mean_train = np.mean([img.mean() for img, _ in train])
        mean_test = np.mean([img.mean() for img, _ in test])
        assert mean_test > mean_train  # brighter blobs plus stronger texture


class TestChargeTask:
    def test_coulomb_pair_closed_form(self):
        image, target = render_charge_image([(10, 10), (10, 12)], [1.0, 1.0], 32)
        assert target == pytest.approx(0.5, rel=1e-12)
        assert image.shape == (3, 32, 32)

    def test_coulomb_triplet(self):
        positions = [(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]
        charges = [1.0, 2.0, 3.0]
        want = 1 * 2 / 3.0 + 1 * 3 / 4.0 + 2 * 3 / 5.0
        assert coulomb_energy(positions, charges) == pytest.approx(want, rel=1e-12)

    def test_min_separation_respected(self):
        spec = SynthSpec(task="charge_energy", seed=11)
        for image, target in synth_generate(spec, 5, "train"):
            assert np.isfinite(target)
            assert target > 0

    def test_deterministic(self):
        spec = from_preset("charge_energy", "none", seed=9)
        a = synth_generate(spec, 3, "test")
        b = synth_generate(spec, 3, "test")
        for (i1, t1), (i2, t2) in zip(a, b):
            np.testing.assert_array_equal(i1, i2)
            assert t1 == t2

    def test_unknown_preset(self):
        with pytest.raises(InvalidConfigError):
            from_preset("charge_energy", "extreme")


class TestCache:
    def test_bitwise_round_trip(self, tmp_path, rng):
        path = tmp_path / "f.bscf"
        x = rng.standard_normal((3, 7))
        digest = bytes(range(32))
        write_cache(path, x, digest)
        y, got = read_cache(path, expected_digest=digest)
        np.testing.assert_array_equal(x, y)
        assert got == digest

    def test_empty_round_trip(self, tmp_path):
        path = tmp_path / "empty.bscf"
        write_cache(path, np.empty((0, 5)))
        y, _ = read_cache(path)
        assert y.shape == (0, 5)

    def test_flipped_byte_detected(self, tmp_path, rng):
        path = tmp_path / "f.bscf"
        write_cache(path, rng.standard_normal((4, 4)))
        raw = bytearray(path.read_bytes())
        raw[70] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(ChecksumMismatchError):
            read_cache(path)

    def test_digest_mismatch(self, tmp_path, rng):
        path = tmp_path / "f.bscf"
        write_cache(path, rng.standard_normal((2, 2)), b"\x07" * 32)
        read_cache(path)  # no expectation: fine
        with pytest.raises(DigestMismatchError):
            read_cache(path, expected_digest=b"\x01" * 32)

    def test_digest_depends_on_config(self):
        from scatgp.filterbank import FilterBankConfig
        from scatgp.scattering import ScatteringConfig

        a = ScatteringConfig(FilterBankConfig(32, 3, 8), 2, "global")
        b = ScatteringConfig(FilterBankConfig(32, 4, 8), 2, "global")
        assert config_digest(a, 1) != config_digest(b, 1)
        assert config_digest(a, 1) != config_digest(a, 3)
        assert len(config_digest(a, 1)) == 32


class TestManifest:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "m.tsv"
        records = [ManifestRecord("a.npy", 1.5, "train"),
                   ManifestRecord("b.npy", -2.25, "test")]
        write_manifest(path, records)
        assert read_manifest(path) == records

    def test_rejects_nonfinite_target_with_line_number(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("# scatgp-manifest v1\nok.npy\t1.0\ttrain\n"
                        "bad.npy\tinf\ttrain\n")
        with pytest.raises(ManifestError, match="line 3"):
            read_manifest(path)

    def test_rejects_unknown_split_with_line_number(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("# scatgp-manifest v1\nok.npy\t1.0\tvalidation\n")
        with pytest.raises(ManifestError, match="line 2"):
            read_manifest(path)

    def test_rejects_missing_header(self, tmp_path):
        path = tmp_path / "m.tsv"
        path.write_text("a.npy\t1.0\ttrain\n")
        with pytest.raises(ManifestError, match="line 1"):
            read_manifest(path)


class TestImageIO:
    def test_npy_round_trip(self, tmp_path, rng):
        arr = rng.standard_normal((3, 16, 16))
        path = tmp_path / "img.npy"
        save_image(path, arr)
        np.testing.assert_array_equal(load_image(path), arr)

    def test_png_round_trip_16bit(self, tmp_path, rng):
        from PIL import Image

        arr = (rng.uniform(0, 1, (16, 16)) * 65535).astype(np.uint16)
        path = tmp_path / "img.png"
        Image.fromarray(arr).save(path)
        loaded = load_image(path)
        np.testing.assert_allclose(loaded, arr / 65535.0, atol=1e-12)

    def test_dataset_directory(self, tmp_path):
        spec = from_preset("blob_count", "none", seed=7)
        manifest = write_dataset(tmp_path / "ds", spec, 4, 2)
        records = read_manifest(manifest)
        assert [r.split for r in records] == ["train"] * 4 + ["test"] * 2
        image = load_image(tmp_path / "ds" / records[0].path)
        assert blob_count_target(image) == records[0].target
