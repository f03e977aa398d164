"""Shared test fixtures: synthetic dataset directories in the published layout."""

import json

import numpy as np


def write_dataset(path, n=10, q=6, s_x=4, s_y=3, seed=5, features=None, labels=None):
    path.mkdir(parents=True, exist_ok=True)
    manifest = {"version": 1, "seed": seed, "probe_type": "near_subsampled",
                "q": q, "s_x_count": s_x, "s_y_count": s_y, "probe_interval": 2,
                "snr_db": 10.0, "n_samples": n}
    (path / "manifest.json").write_text(json.dumps(manifest))
    rng = np.random.default_rng(0)
    if features is None:
        features = rng.normal(size=(n, q, 2))
    features = np.asarray(features, dtype="<f4").reshape(n, q, 2)
    (path / "features.bin").write_bytes(features.tobytes())
    if labels is None:
        labels = np.column_stack([rng.integers(1, s_x + 1, n),
                                  rng.integers(1, s_y + 1, n)])
    labels = np.asarray(labels, dtype="<u4").reshape(n, 2)
    (path / "labels.bin").write_bytes(labels.tobytes())
    return features, labels
