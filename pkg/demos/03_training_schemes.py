"""Beam-training schemes head to head
=====================================

Runs every scheme on the same channels and compares chosen-beam quality
against pilot cost. Predictor-driven schemes are shown twice: with the
one-hot oracle (an upper bound) and with the uniform stub (a floor); a real
learned predictor lands between the two.

Run from the repository root:  python demos/03_training_schemes.py
"""

import numpy as np

from xlris import (NoiseModel, build_far_field_codebook, build_near_field_codebook,
                   desk_scale, derive_rng, normalized_gain, sample_channel, subsample,
                   true_optimal)
from xlris.rng import STREAM_TRIAL_CHANNEL, STREAM_TRIAL_NOISE
from xlris.schemes import (OneHotOracle, UniformStub, exhaustive_sweep, fbt,
                           hierarchical_search, improved_pnbt, pnbt)

cfg = desk_scale()
near = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter,
                                 cfg.user_height, cfg.phase_mode)
far = build_far_field_codebook(cfg.ris)
probe = subsample(len(near), 8)

N_TRIALS = 200
SEED = 17

# The array factor in the path gains puts the interesting probe-noise regime
# far below 0 dB transmit SNR at this scale; -45 dB makes the sweep sweat.
noise = NoiseModel.from_snr_db(-45.0)
print(f"probe noise sigma^2 = {noise.sigma2:.0f} (transmit SNR -45 dB)\n")

channels = [sample_channel(cfg, derive_rng(SEED, STREAM_TRIAL_CHANNEL, t))
            for t in range(N_TRIALS)]
optima = [true_optimal(near, ch) for ch in channels]


def evaluate(name, runner):
    gains, probes = [], []
    for t, chan in enumerate(channels):
        rng = derive_rng(SEED, STREAM_TRIAL_NOISE, t)
        res = runner(chan, rng, t)
        gains.append(normalized_gain(near.codewords[res.chosen_flat_index - 1],
                                     near.codewords[optima[t] - 1], chan))
        probes.append(res.probes_used)
    print(f"{name:<28} gain {np.mean(gains):6.3f}   probes {np.mean(probes):7.1f}")


print(f"{'scheme':<28} {'mean':>9}   {'mean pilot':>13}")
evaluate("exhaustive sweep",
         lambda ch, rng, t: exhaustive_sweep(near, ch, noise, rng))
evaluate("hierarchical (factor 4)",
         lambda ch, rng, t: hierarchical_search(near, 4, ch, noise, rng))
evaluate("fbt + oracle",
         lambda ch, rng, t: fbt(far, near, OneHotOracle.for_channel(near, ch),
                                ch, noise, rng))
evaluate("pnbt + oracle",
         lambda ch, rng, t: pnbt(near, probe, OneHotOracle.for_channel(near, ch),
                                 ch, noise, rng))
evaluate("pnbt + uniform stub",
         lambda ch, rng, t: pnbt(near, probe, UniformStub(near.s_x_count, near.s_y_count),
                                 ch, noise, rng))
evaluate("improved pnbt + oracle",
         lambda ch, rng, t: improved_pnbt(near, probe,
                                          OneHotOracle.for_channel(near, ch),
                                          2, 5, ch, noise, rng))
evaluate("improved pnbt + uniform",
         lambda ch, rng, t: improved_pnbt(near, probe,
                                          UniformStub(near.s_x_count, near.s_y_count),
                                          2, 5, ch, noise, rng))

print("""
Reading the table: the sweep pays 240 pilots for its gain; the probe-set
schemes pay 30-40. The improved variant re-tests the top k_x * k_y predicted
candidates and trusts those measurements, which cuts both ways: it lifts the
uniform stub above plain selection, but at this brutal SNR it also drags the
oracle below plain pnbt (whose "prediction" here is noise-free by
construction). With a real learned predictor and moderate noise, the
re-testing phase is what closes the gap to the exhaustive sweep; rerun with
NoiseModel.from_snr_db(-30.0) to watch every measurement-driven row recover.
""")
