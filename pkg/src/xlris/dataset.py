"""Deterministic labelled-dataset generation and its bit-exact disk format.

A dataset directory holds exactly three files:

* ``manifest.json`` — UTF-8, fixed key order, every parameter needed to
  regenerate the data (including the rng family and key layout).
* ``features.bin`` — n_samples x Q x 2 little-endian float32, row-major,
  real then imaginary per probe observation.
* ``labels.bin`` — n_samples x 2 little-endian uint32, the 1-based
  (s_x, s_y) index pair of the optimal near-field codeword.

Sample ``i`` derives its own generator from (seed, i), draws a channel, and
then draws its probe noise from the same stream, so samples are independent
of generation order. Labels come from the noiseless strongest-path argmax:
noisy labels would degrade supervision while the gain metric is defined
against the true optimum regardless.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

import numpy as np

from .channel import NoiseModel, receive_batch, sample_channel
from .codebook import build_far_field_codebook, build_near_field_codebook, index_pair, subsample
from .config import SystemConfig
from .rng import RNG_FAMILY, RNG_KEY_LAYOUT, STREAM_SAMPLE, STREAM_SPLIT, derive_rng

MANIFEST_VERSION = 1
PROBE_TYPES = ("far_field", "near_subsampled")


@dataclass(frozen=True)
class TrainingSample:
    features: np.ndarray  # (Q,) complex
    label_sx: int
    label_sy: int


@dataclass(frozen=True)
class DatasetManifest:
    version: int
    seed: int
    probe_type: str
    q: int
    s_x_count: int
    s_y_count: int
    probe_interval: int | None
    snr_db: float | None
    n_samples: int
    system: SystemConfig

    def __post_init__(self):
        if self.probe_type not in PROBE_TYPES:
            raise ValueError(f"probe_type must be one of {PROBE_TYPES}")
        if self.n_samples < 0:
            raise ValueError("n_samples must be nonnegative")
        if self.probe_type == "far_field":
            expect = self.system.ris.n_elements
        else:
            if self.probe_interval is None or self.probe_interval < 1:
                raise ValueError("near_subsampled datasets need a probe_interval >= 1")
            expect = self.system.grid.n_points // self.probe_interval
        if self.q != expect:
            raise ValueError(f"q={self.q} inconsistent with probe_type (expected {expect})")

    @classmethod
    def far_field(cls, system: SystemConfig, snr_db: float | None,
                  n_samples: int, seed: int) -> "DatasetManifest":
        return cls(MANIFEST_VERSION, seed, "far_field", system.ris.n_elements,
                   system.grid.s_x_count, system.grid.s_y_count, None,
                   snr_db, n_samples, system)

    @classmethod
    def near_subsampled(cls, system: SystemConfig, probe_interval: int,
                        snr_db: float | None, n_samples: int, seed: int) -> "DatasetManifest":
        q = system.grid.n_points // int(probe_interval)
        return cls(MANIFEST_VERSION, seed, "near_subsampled", q,
                   system.grid.s_x_count, system.grid.s_y_count, int(probe_interval),
                   snr_db, n_samples, system)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "seed": self.seed,
            "probe_type": self.probe_type,
            "q": self.q,
            "s_x_count": self.s_x_count,
            "s_y_count": self.s_y_count,
            "probe_interval": self.probe_interval,
            "snr_db": self.snr_db,
            "n_samples": self.n_samples,
            "phase_mode": self.system.phase_mode,
            "rng_family": RNG_FAMILY,
            "rng_key_layout": RNG_KEY_LAYOUT,
            "system": self.system.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DatasetManifest":
        snr = d["snr_db"]
        return cls(int(d["version"]), int(d["seed"]), str(d["probe_type"]), int(d["q"]),
                   int(d["s_x_count"]), int(d["s_y_count"]),
                   None if d.get("probe_interval") is None else int(d["probe_interval"]),
                   None if snr is None else float(snr),
                   int(d["n_samples"]), SystemConfig.from_dict(d["system"]))


@dataclass
class Dataset:
    """In-memory view: complex features (n, Q) and 1-based labels (n, 2)."""

    manifest: DatasetManifest
    features: np.ndarray
    labels: np.ndarray

    def __len__(self) -> int:
        return self.features.shape[0]

    def sample(self, i: int) -> TrainingSample:
        return TrainingSample(self.features[i], int(self.labels[i, 0]), int(self.labels[i, 1]))


def probe_codewords(manifest: DatasetManifest) -> np.ndarray:
    """The (Q, N) codeword block probed for every sample of this dataset."""
    system = manifest.system
    if manifest.probe_type == "far_field":
        return build_far_field_codebook(system.ris).codewords
    near = build_near_field_codebook(system.grid, system.ris, system.g_scatter,
                                     system.user_height, system.phase_mode)
    probe = subsample(len(near), manifest.probe_interval)
    return near.codewords[probe.flat_indices - 1]


def generate_sample(manifest: DatasetManifest, index: int,
                    probes: np.ndarray, near_codebook) -> TrainingSample:
    """Regenerate sample ``index`` from its derived stream alone."""
    from .schemes import true_optimal

    rng = derive_rng(manifest.seed, STREAM_SAMPLE, index)
    chan = sample_channel(manifest.system, rng)
    s = true_optimal(near_codebook, chan)
    chan.true_optimal_flat_index = s
    s_x, s_y = index_pair(s, manifest.s_x_count)
    noise = NoiseModel.from_snr_db(manifest.snr_db)
    y = receive_batch(probes, chan, noise, rng)
    return TrainingSample(y, s_x, s_y)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def encode_features(features: np.ndarray) -> bytes:
    out = np.empty(features.shape + (2,), dtype="<f4")
    out[..., 0] = features.real.astype(np.float32)
    out[..., 1] = features.imag.astype(np.float32)
    return out.tobytes()


def decode_features(data: bytes, n_samples: int, q: int) -> np.ndarray:
    raw = np.frombuffer(data, dtype="<f4").reshape(n_samples, q, 2)
    return (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex64)


def generate_dataset(manifest: DatasetManifest, out_dir) -> Path:
    """Generate and serialize the full dataset; returns the directory path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    system = manifest.system
    near = build_near_field_codebook(system.grid, system.ris, system.g_scatter,
                                     system.user_height, system.phase_mode)
    probes = probe_codewords(manifest)

    features = np.zeros((manifest.n_samples, manifest.q), dtype=complex)
    labels = np.zeros((manifest.n_samples, 2), dtype="<u4")
    for i in range(manifest.n_samples):
        sample = generate_sample(manifest, i, probes, near)
        features[i] = sample.features
        labels[i, 0] = sample.label_sx
        labels[i, 1] = sample.label_sy

    manifest_bytes = json.dumps(manifest.to_dict(), indent=1).encode("utf-8") + b"\n"
    _atomic_write(out_dir / "manifest.json", manifest_bytes)
    _atomic_write(out_dir / "features.bin", encode_features(features))
    _atomic_write(out_dir / "labels.bin", labels.astype("<u4").tobytes())
    return out_dir


def load_dataset(path) -> Dataset:
    path = Path(path)
    manifest = DatasetManifest.from_dict(
        json.loads((path / "manifest.json").read_text(encoding="utf-8")))
    features = decode_features((path / "features.bin").read_bytes(),
                               manifest.n_samples, manifest.q)
    labels = np.frombuffer((path / "labels.bin").read_bytes(),
                           dtype="<u4").reshape(manifest.n_samples, 2).copy()
    if np.any(labels[:, 0] < 1) or np.any(labels[:, 0] > manifest.s_x_count) \
            or np.any(labels[:, 1] < 1) or np.any(labels[:, 1] > manifest.s_y_count):
        raise ValueError("labels out of range for the declared grid")
    return Dataset(manifest, features, labels)


def save_dataset(dataset: Dataset, out_dir) -> Path:
    """Re-serialize an in-memory dataset with the standard layout."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_bytes = json.dumps(dataset.manifest.to_dict(), indent=1).encode("utf-8") + b"\n"
    _atomic_write(out_dir / "manifest.json", manifest_bytes)
    _atomic_write(out_dir / "features.bin", encode_features(dataset.features))
    _atomic_write(out_dir / "labels.bin", dataset.labels.astype("<u4").tobytes())
    return out_dir


def split(dataset: Dataset, train_fraction: float) -> tuple[Dataset, Dataset]:
    """Disjoint train/eval partition: seeded shuffle, then a contiguous cut."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n = len(dataset)
    perm = derive_rng(dataset.manifest.seed, STREAM_SPLIT).permutation(n)
    n_train = int(n * train_fraction)
    train_idx, eval_idx = perm[:n_train], perm[n_train:]

    def view(idx: np.ndarray) -> Dataset:
        m = replace(dataset.manifest, n_samples=len(idx))
        return Dataset(m, dataset.features[idx], dataset.labels[idx])

    return view(train_idx), view(eval_idx)
