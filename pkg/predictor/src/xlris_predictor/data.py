"""Readers for the beam-training dataset directory format.

The format is the simulator's published contract: ``manifest.json`` plus raw
little-endian binaries. Features are n x q x 2 float32 (re, im interleaved);
labels are n x 2 uint32 (1-based s_x, s_y). The train/eval split is
reproduced from the manifest seed with the generator family the manifest
pins (Philox 4x64-10 keyed as (seed, stream * 2**56 + index), split stream 2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SPLIT_STREAM = 2


@dataclass
class BeamDataset:
    manifest: dict
    features: np.ndarray  # (n, q) complex64
    labels: np.ndarray    # (n, 2) int64, 1-based (s_x, s_y)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def q(self) -> int:
        return int(self.manifest["q"])

    @property
    def s_x_count(self) -> int:
        return int(self.manifest["s_x_count"])

    @property
    def s_y_count(self) -> int:
        return int(self.manifest["s_y_count"])

    def axis_classes(self, axis: str) -> np.ndarray:
        """0-based class ids for one axis network ('x' or 'y')."""
        if axis not in ("x", "y"):
            raise ValueError("axis must be 'x' or 'y'")
        col = 0 if axis == "x" else 1
        return self.labels[:, col] - 1

    def head_dim(self, axis: str) -> int:
        return self.s_x_count if axis == "x" else self.s_y_count


def load_dataset(path) -> BeamDataset:
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text(encoding="utf-8"))
    n, q = int(manifest["n_samples"]), int(manifest["q"])
    raw = np.frombuffer((path / "features.bin").read_bytes(), dtype="<f4")
    if raw.size != n * q * 2:
        raise ValueError(f"features.bin holds {raw.size} floats, expected {n * q * 2}")
    raw = raw.reshape(n, q, 2)
    features = (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex64)
    labels = np.frombuffer((path / "labels.bin").read_bytes(), dtype="<u4")
    if labels.size != n * 2:
        raise ValueError(f"labels.bin holds {labels.size} values, expected {n * 2}")
    labels = labels.reshape(n, 2).astype(np.int64)
    return BeamDataset(manifest, features, labels)


def split_indices(seed: int, n: int, train_fraction: float = 0.9
                  ) -> tuple[np.ndarray, np.ndarray]:
    """The generator-side train/eval permutation, reproduced from the manifest."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    key = np.array([np.uint64(seed), np.uint64(SPLIT_STREAM << 56)], dtype=np.uint64)
    perm = np.random.Generator(np.random.Philox(key=key)).permutation(n)
    n_train = int(n * train_fraction)
    return perm[:n_train], perm[n_train:]


def train_eval_split(dataset: BeamDataset, train_fraction: float = 0.9
                     ) -> tuple[BeamDataset, BeamDataset]:
    train_idx, eval_idx = split_indices(int(dataset.manifest["seed"]),
                                        len(dataset), train_fraction)

    def view(idx):
        return BeamDataset(dataset.manifest, dataset.features[idx], dataset.labels[idx])

    return view(train_idx), view(eval_idx)
