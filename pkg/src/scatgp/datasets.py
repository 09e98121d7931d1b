"""Synthetic image-regression tasks, dataset manifests and feature caches.

Two generator families emulate counting and energy-regression tasks:

* ``blob_count``: Gaussian blobs on a textured background; the target is
  the exact number of pixels above 0.5, recomputed from the rendered
  image, so the conditional p(y|X) is deterministic and identical across
  splits.  Covariate shift is induced purely through the image
  distribution (blob intensity, background texture).
* ``charge_energy``: 2-6 point charges rendered as three smoothed density
  channels (two Gaussian widths plus a near-delta channel); the target is
  the pairwise Coulomb sum q_i q_j / r_ij.

Generation is pure in (spec, split, index): every sample draws from its
own seeded stream, so parallel generation is bitwise-identical to
sequential.

The feature-cache format is binary: magic ``BSCF``, version, row count,
dimension, a 32-byte scattering-config digest, row-major float64
little-endian body, and a CRC32 footer over header plus body.
"""

from __future__ import annotations

import hashlib
import math
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (CacheFormatError, ChecksumMismatchError, DigestMismatchError,
                     InvalidConfigError, ManifestError, NonFiniteInputError)

TASKS = ("blob_count", "charge_energy")
SPLITS = ("train", "test")

BLOB_THRESHOLD = 0.5
CHARGE_CHANNEL_SIGMAS = (3.0, 1.5, 0.6)

MANIFEST_HEADER = "# scatgp-manifest v1"
CACHE_MAGIC = b"BSCF"
CACHE_VERSION = 1
_HEADER_STRUCT = struct.Struct("<4sIQQ32s")
_FOOTER_STRUCT = struct.Struct("<I")


@dataclass(frozen=True)
class BlobParams:
    """Rendering distribution for the blob-counting task."""

    count_range: tuple = (1, 10)
    intensity_range: tuple = (0.7, 1.3)
    sigma_range: tuple = (1.5, 4.0)
    background_amplitude: float = 0.25
    background_smoothness: float = 3.0


@dataclass(frozen=True)
class ChargeParams:
    """Placement distribution for the charge-energy task."""

    count_range: tuple = (2, 6)
    placement_radius: float = 0.80   # fraction of N/2
    charge_values: tuple = (1, 2, 3, 4)
    min_separation: float = 2.0      # pixels


SHIFT_PRESETS = {
    "blob_count": {
        "none": (BlobParams(), BlobParams()),
        "mild": (BlobParams(),
                 BlobParams(intensity_range=(0.8, 1.5),
                            background_amplitude=0.32)),
        "strong": (BlobParams(),
                   BlobParams(intensity_range=(0.9, 1.8),
                              sigma_range=(1.2, 3.2),
                              background_amplitude=0.40,
                              background_smoothness=2.0)),
    },
    "charge_energy": {
        "none": (ChargeParams(), ChargeParams()),
        "mild": (ChargeParams(), ChargeParams(placement_radius=0.6)),
        "strong": (ChargeParams(),
                   ChargeParams(placement_radius=0.55, count_range=(3, 6))),
    },
}


@dataclass(frozen=True)
class SynthSpec:
    """Task, grid size and per-split rendering parameters."""

    task: str
    image_size: int = 32
    train_params: object = None
    test_params: object = None
    seed: int = 0

    def __post_init__(self):
        if self.task not in TASKS:
            raise InvalidConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        default = BlobParams() if self.task == "blob_count" else ChargeParams()
        if self.train_params is None:
            object.__setattr__(self, "train_params", default)
        if self.test_params is None:
            object.__setattr__(self, "test_params", default)

    @property
    def channels(self) -> int:
        return 1 if self.task == "blob_count" else len(CHARGE_CHANNEL_SIGMAS)

    def params_for(self, split):
        if split not in SPLITS:
            raise InvalidConfigError(f"split must be one of {SPLITS}, got {split!r}")
        return self.train_params if split == "train" else self.test_params


def from_preset(task, preset, image_size=32, seed=0) -> SynthSpec:
    presets = SHIFT_PRESETS.get(task)
    if presets is None or preset not in presets:
        known = sorted(SHIFT_PRESETS.get(task, {}))
        raise InvalidConfigError(f"unknown shift preset {preset!r} for {task}; "
                                 f"known: {known}")
    train, test = presets[preset]
    return SynthSpec(task=task, image_size=image_size,
                     train_params=train, test_params=test, seed=seed)


def _sample_rng(spec, split, index):
    split_id = SPLITS.index(split)
    return np.random.default_rng(np.random.SeedSequence([spec.seed, split_id, index]))


def _smooth_noise(rng, n, smoothness):
    """Periodic smooth texture in [0, 1] via Fourier-domain Gaussian decay."""
    white = rng.standard_normal((n, n))
    w = 2.0 * np.pi * np.fft.fftfreq(n)
    w1, w2 = np.meshgrid(w, w, indexing="ij")
    decay = np.exp(-0.5 * smoothness ** 2 * (w1 ** 2 + w2 ** 2))
    tex = np.fft.ifft2(np.fft.fft2(white) * decay).real
    lo, hi = tex.min(), tex.max()
    return (tex - lo) / (hi - lo) if hi > lo else np.zeros_like(tex)


def render_blob_image(rng, params: BlobParams, n, blob_count=None):
    """One blob image and its pixel-count target; ``blob_count`` overrides
    the sampled count (0 is allowed as a test hook)."""
    k = (int(rng.integers(params.count_range[0], params.count_range[1] + 1))
         if blob_count is None else int(blob_count))
    image = params.background_amplitude * _smooth_noise(
        rng, n, params.background_smoothness)
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    for _ in range(k):
        cx, cy = rng.uniform(0, n, size=2)
        sigma = rng.uniform(*params.sigma_range)
        amp = rng.uniform(*params.intensity_range)
        image += amp * np.exp(-(((ii - cx) ** 2 + (jj - cy) ** 2)
                                / (2.0 * sigma ** 2)))
    target = blob_count_target(image)
    return image[None], target


def blob_count_target(image):
    """The task's deterministic labeling rule: pixels above the threshold."""
    return float((np.asarray(image) > BLOB_THRESHOLD).sum())


def _place_charges(rng, params: ChargeParams, n):
    center = n / 2.0
    radius = params.placement_radius * (n / 2.0 - 2.0)
    count = int(rng.integers(params.count_range[0], params.count_range[1] + 1))
    positions = []
    attempts = 0
    while len(positions) < count:
        attempts += 1
        if attempts > 1000:
            raise InvalidConfigError(
                "charge placement failed; min_separation too large for the radius")
        angle = rng.uniform(0.0, 2.0 * np.pi)
        rad = radius * math.sqrt(rng.uniform())
        cand = (center + rad * math.cos(angle), center + rad * math.sin(angle))
        if all(math.hypot(cand[0] - p[0], cand[1] - p[1]) >= params.min_separation
               for p in positions):
            positions.append(cand)
    charges = rng.choice(params.charge_values, size=count)
    return np.array(positions), np.asarray(charges, dtype=np.float64)


def render_charge_image(positions, charges, n):
    """Density channels and Coulomb-sum target for explicit charges."""
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    charges = np.asarray(charges, dtype=np.float64).ravel()
    ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    image = np.zeros((len(CHARGE_CHANNEL_SIGMAS), n, n))
    for c, sigma in enumerate(CHARGE_CHANNEL_SIGMAS):
        for (cx, cy), q in zip(positions, charges):
            image[c] += q * np.exp(-(((ii - cx) ** 2 + (jj - cy) ** 2)
                                     / (2.0 * sigma ** 2)))
    return image, coulomb_energy(positions, charges)


def coulomb_energy(positions, charges):
    """Pairwise sum q_i q_j / ||r_i - r_j|| (distances in pixels)."""
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    charges = np.asarray(charges, dtype=np.float64).ravel()
    total = 0.0
    for i in range(len(charges)):
        for j in range(i + 1, len(charges)):
            dist = float(np.linalg.norm(positions[i] - positions[j]))
            total += float(charges[i] * charges[j]) / dist
    return total


def synth_generate(spec: SynthSpec, count, split="train"):
    """Deterministically generate ``count`` (image, target) samples."""
    if count < 1:
        raise InvalidConfigError(f"count must be >= 1, got {count}")
    params = spec.params_for(split)
    samples = []
    for index in range(count):
        rng = _sample_rng(spec, split, index)
        if spec.task == "blob_count":
            samples.append(render_blob_image(rng, params, spec.image_size))
        else:
            positions, charges = _place_charges(rng, params, spec.image_size)
            samples.append(render_charge_image(positions, charges, spec.image_size))
    return samples


# ---------------------------------------------------------------------------
# image files


def save_image(path, image):
    """Raw float container (.npy) for lossless float64 round trips."""
    np.save(path, np.asarray(image, dtype=np.float64))


def load_image(path):
    """Load .npy (raw float) or PNG (8/16-bit, scaled to [0, 1])."""
    path = Path(path)
    if path.suffix == ".npy":
        arr = np.load(path)
        return np.asarray(arr, dtype=np.float64)
    if path.suffix.lower() == ".png":
        from PIL import Image

        with Image.open(path) as img:
            arr = np.asarray(img)
        scale = 65535.0 if arr.dtype == np.uint16 else 255.0
        arr = arr.astype(np.float64) / scale
        if arr.ndim == 3:
            arr = np.moveaxis(arr, -1, 0)
        return arr
    raise InvalidConfigError(f"unsupported image format: {path.suffix!r}")


# ---------------------------------------------------------------------------
# manifests


@dataclass(frozen=True)
class ManifestRecord:
    path: str
    target: float
    split: str


def write_manifest(path, records):
    lines = [MANIFEST_HEADER]
    for rec in records:
        lines.append(f"{rec.path}\t{float(rec.target)!r}\t{rec.split}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path):
    """Parse a manifest; malformed rows raise with their line number."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# scatgp-manifest"):
        raise ManifestError(f"{path}: line 1: missing manifest header")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ManifestError(
                f"{path}: line {lineno}: expected 3 tab-separated fields, "
                f"got {len(parts)}")
        rec_path, target_str, split = parts
        try:
            target = float(target_str)
        except ValueError:
            raise ManifestError(
                f"{path}: line {lineno}: target {target_str!r} is not a number")
        if not math.isfinite(target):
            raise ManifestError(f"{path}: line {lineno}: target is not finite")
        if split not in SPLITS:
            raise ManifestError(
                f"{path}: line {lineno}: unknown split {split!r} "
                f"(expected one of {SPLITS})")
        if not rec_path:
            raise ManifestError(f"{path}: line {lineno}: empty image path")
        records.append(ManifestRecord(path=rec_path, target=target, split=split))
    return records


def write_dataset(out_dir, spec: SynthSpec, n_train, n_test):
    """Render a dataset directory: images/*.npy plus manifest.tsv."""
    out_dir = Path(out_dir)
    (out_dir / "images").mkdir(parents=True, exist_ok=True)
    records = []
    for split, count in (("train", n_train), ("test", n_test)):
        for idx, (image, target) in enumerate(synth_generate(spec, count, split)):
            rel = f"images/{split}_{idx:05d}.npy"
            save_image(out_dir / rel, image)
            records.append(ManifestRecord(path=rel, target=target, split=split))
    manifest_path = out_dir / "manifest.tsv"
    write_manifest(manifest_path, records)
    return manifest_path


# ---------------------------------------------------------------------------
# feature cache


def config_digest(scattering_config, channels) -> bytes:
    """32-byte digest tying a cache to its scattering configuration."""
    key = f"{scattering_config.cache_key()};C={channels}"
    return hashlib.sha256(key.encode()).digest()


def write_cache(path, features, digest=b"\x00" * 32):
    features = np.ascontiguousarray(np.asarray(features, dtype=np.float64))
    if features.ndim != 2:
        raise InvalidConfigError(f"features must be 2D, got shape {features.shape}")
    if not np.all(np.isfinite(features)):
        raise NonFiniteInputError("refusing to cache non-finite features")
    if len(digest) != 32:
        raise InvalidConfigError("digest must be exactly 32 bytes")
    header = _HEADER_STRUCT.pack(CACHE_MAGIC, CACHE_VERSION,
                                 features.shape[0], features.shape[1], digest)
    body = features.astype("<f8").tobytes()
    footer = _FOOTER_STRUCT.pack(zlib.crc32(header + body) & 0xFFFFFFFF)
    Path(path).write_bytes(header + body + footer)


def read_cache(path, expected_digest=None):
    """Read a feature cache, verifying checksum and (optionally) digest.

    Returns (features, digest).
    """
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER_STRUCT.size + _FOOTER_STRUCT.size:
        raise CacheFormatError(f"{path}: truncated cache file")
    header = raw[:_HEADER_STRUCT.size]
    magic, version, n, d, digest = _HEADER_STRUCT.unpack(header)
    if magic != CACHE_MAGIC:
        raise CacheFormatError(f"{path}: bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise CacheFormatError(f"{path}: unsupported version {version}")
    body_len = n * d * 8
    expected_len = _HEADER_STRUCT.size + body_len + _FOOTER_STRUCT.size
    if len(raw) != expected_len:
        raise CacheFormatError(
            f"{path}: expected {expected_len} bytes, found {len(raw)}")
    body = raw[_HEADER_STRUCT.size:_HEADER_STRUCT.size + body_len]
    (crc_stored,) = _FOOTER_STRUCT.unpack(raw[-_FOOTER_STRUCT.size:])
    if zlib.crc32(header + body) & 0xFFFFFFFF != crc_stored:
        raise ChecksumMismatchError(f"{path}: checksum mismatch")
    if expected_digest is not None and digest != expected_digest:
        raise DigestMismatchError(
            f"{path}: cache was written under a different scattering config")
    features = np.frombuffer(body, dtype="<f8").reshape(n, d).copy()
    return features, digest
