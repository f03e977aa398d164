"""Deterministic stream derivation for Monte-Carlo work.

Every sample/trial gets its own counter-based generator so that generation
order (or parallel execution) cannot change any individual result. The
derivation is pinned so it can be reproduced outside this package:

    generator : Philox 4x64 with 10 rounds
    key       : (seed, stream * 2**56 + index), both as unsigned 64-bit words
    counter   : starts at zero

Stream ids are small constants below; ``index`` must stay under 2**56.
"""

from __future__ import annotations

import numpy as np

RNG_FAMILY = "philox4x64-10"
RNG_KEY_LAYOUT = "key = (seed, stream * 2**56 + index)"

STREAM_SAMPLE = 1        # dataset sample i: channel draw then probe noise
STREAM_SPLIT = 2         # train/eval shuffle
STREAM_TRIAL_CHANNEL = 3 # evaluation trial channels (shared across schemes/SNRs)
STREAM_TRIAL_NOISE = 4   # per-(cell, trial) probe noise during evaluation

_INDEX_LIMIT = 1 << 56


def derive_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    if not 0 <= index < _INDEX_LIMIT:
        raise ValueError(f"stream index out of range: {index}")
    key = np.array([np.uint64(seed), np.uint64((stream << 56) + index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
