"""The three per-trial evaluation criteria plus pilot-overhead discounting.

Both rate metrics are evaluated against the strongest path only; weaker
paths influence what a scheme picks, not how the pick is scored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization


@dataclass(frozen=True)
class TrialMetrics:
    achievable_rate: float
    normalized_gain: float
    effective_rate: float
    probes_used: int

    def __post_init__(self):
        if self.normalized_gain > 1.0 + 1e-9:
            raise ValueError(f"normalized gain {self.normalized_gain} exceeds 1")
        if self.effective_rate > self.achievable_rate + 1e-12:
            raise ValueError("effective rate cannot exceed the achievable rate")


def achievable_rate(chosen_codeword: np.ndarray, chan: ChannelRealization,
                    sigma2: float) -> float:
    """log2(1 + |w^T c|^2 / sigma2) against the strongest-path steering vector."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive for a finite rate")
    power = abs(np.dot(chosen_codeword, chan.strongest.steering)) ** 2
    return math.log2(1.0 + power / sigma2)


def normalized_gain(chosen_codeword: np.ndarray, optimal_codeword: np.ndarray,
                    chan: ChannelRealization) -> float:
    """Beamforming power of the pick relative to the best codebook codeword."""
    c = chan.strongest.steering
    denom = abs(np.dot(optimal_codeword, c)) ** 2
    if denom == 0:
        raise ValueError("optimal codeword has zero gain on the strongest path")
    return abs(np.dot(chosen_codeword, c)) ** 2 / denom


def effective_rate(rate: float, t_train: float, t_total: float) -> float:
    """Rate discounted by the fraction of the coherence interval spent training."""
    if t_total <= 0:
        raise ValueError("t_total must be positive")
    if not 0 <= t_train <= t_total:
        raise ValueError(f"t_train={t_train} must lie in [0, {t_total}]")
    return (1.0 - t_train / t_total) * rate
