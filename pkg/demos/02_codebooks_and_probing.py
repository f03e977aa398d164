"""Codebooks and the pilot probing model
========================================

Builds the two codebooks the training schemes choose from, shows the 1-based
flat indexing convention, and walks one probing round: codeword in, complex
observation out.

Run from the repository root:  python demos/02_codebooks_and_probing.py
"""

import numpy as np

from xlris import (NoiseModel, build_far_field_codebook, build_near_field_codebook,
                   desk_scale, derive_rng, flat_index, index_pair, receive_batch,
                   sample_channel, subsample, true_optimal)

cfg = desk_scale()

# Far-field codebook: one codeword per element, laid out on the DFT grid.
far = build_far_field_codebook(cfg.ris)
u_grid = ", ".join(f"{u:+.3f}" for u in sorted(set(far.grid[:, 0]))[:3])
print(f"far-field codebook: {len(far)} codewords (u grid {u_grid}, ...)")

# Near-field codebook: one codeword per lattice point in front of the panel.
near = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter,
                                 cfg.user_height, cfg.phase_mode)
print(f"near-field codebook: {len(near)} codewords on a "
      f"{near.s_x_count}x{near.s_y_count} grid, "
      f"dx={near.delta_x} m, dy={near.delta_y} m")

# Flat indices are 1-based and y-major: x varies fastest.
s = flat_index(3, 2, near.s_x_count)
print(f"grid point (s_x=3, s_y=2) -> flat index {s} -> point {near.point_for(s)}")
assert index_pair(s, near.s_x_count) == (3, 2)

# The probe set for partial near-field training: every 8th codeword here.
probe = subsample(len(near), 8)
print(f"probe set: every 8th codeword -> {len(probe)} probes, "
      f"first/last {probe.flat_indices[0]}/{probe.flat_indices[-1]}")

# One probing round against a drawn channel. The channel carries one strong
# cascaded path plus weak cross terms; observations are one complex sample
# per codeword tested.
chan = sample_channel(cfg, derive_rng(seed=5, stream=3, index=0))
print(f"\nuser at {chan.user_position}")
print(f"strongest-path |gain| = {abs(chan.terms[0].gain):.1f}, "
      f"{len(chan.terms) - 1} weak terms")

noise = NoiseModel.from_snr_db(10.0)
y = receive_batch(near.codewords[probe.flat_indices - 1], chan, noise,
                  derive_rng(seed=5, stream=4, index=0))
print(f"probe observations: shape {y.shape}, "
      f"|y| in [{np.abs(y).min():.2f}, {np.abs(y).max():.2f}]")

# The strongest probe points at the right neighbourhood, but the true
# optimum usually sits between probes; that gap is the predictor's job.
best_probe = probe.flat_indices[int(np.argmax(np.abs(y)))]
optimum = true_optimal(near, chan)
print(f"strongest probe index {best_probe} "
      f"(grid {index_pair(int(best_probe), near.s_x_count)}), "
      f"true optimum {optimum} (grid {index_pair(optimum, near.s_x_count)})")

# Codebooks can be cached to disk and reloaded bit-exactly.
from tempfile import TemporaryDirectory

from xlris import load_codebook, save_codebook

with TemporaryDirectory() as tmp:
    save_codebook(near, tmp)
    again = load_codebook(tmp)
    assert np.array_equal(again.codewords, near.codewords)
print("\ncodebook cache roundtrip: bit-exact")
