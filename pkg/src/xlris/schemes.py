"""Beam-training schemes: sweeps, hierarchical baseline, and predictor-driven search.

Every scheme returns the 1-based flat index of the chosen near-field codeword
plus the number of pilot slots it consumed. All argmax operations break ties
toward the smallest index so that runs are reproducible.

The predictor-driven schemes (:func:`fbt`, :func:`pnbt`,
:func:`improved_pnbt`) are split into a probe stage and a selection stage so
that a batch-oriented predictor (for example an external process) can be
called once for many trials; the one-call functions compose the stages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, NoiseModel, receive_batch
from .codebook import FarFieldCodebook, NearFieldCodebook, ProbeSet, flat_index, index_pair


class PredictorContractError(RuntimeError):
    """A predictor returned output violating its contract; the trial is aborted."""


@dataclass
class ProbabilityPair:
    """Per-axis categorical distributions over grid indices (entry i is index i+1)."""

    p_x: np.ndarray
    p_y: np.ndarray

    def __post_init__(self):
        self.p_x = np.asarray(self.p_x, dtype=float)
        self.p_y = np.asarray(self.p_y, dtype=float)
        for name, p in (("p_x", self.p_x), ("p_y", self.p_y)):
            if p.ndim != 1 or p.size == 0:
                raise ValueError(f"{name} must be a nonempty vector")
            if np.any(p < 0):
                raise ValueError(f"{name} has negative entries")
            if abs(p.sum() - 1.0) > 1e-5:
                raise ValueError(f"{name} sums to {p.sum()}, not 1")


@dataclass(frozen=True)
class UniformStub:
    """Uninformed predictor: uniform over both axes (argmax lands on index 1)."""

    s_x_count: int
    s_y_count: int

    def predict(self, received: np.ndarray) -> ProbabilityPair:
        return ProbabilityPair(np.full(self.s_x_count, 1.0 / self.s_x_count),
                               np.full(self.s_y_count, 1.0 / self.s_y_count))


@dataclass(frozen=True)
class OneHotOracle:
    """Test double that places probability 1 on a known optimal index pair."""

    s_x: int
    s_y: int
    s_x_count: int
    s_y_count: int

    @classmethod
    def for_channel(cls, codebook: NearFieldCodebook, chan: ChannelRealization) -> "OneHotOracle":
        s = true_optimal(codebook, chan)
        s_x, s_y = index_pair(s, codebook.s_x_count, len(codebook))
        return cls(s_x, s_y, codebook.s_x_count, codebook.s_y_count)

    def predict(self, received: np.ndarray) -> ProbabilityPair:
        p_x = np.zeros(self.s_x_count)
        p_y = np.zeros(self.s_y_count)
        p_x[self.s_x - 1] = 1.0
        p_y[self.s_y - 1] = 1.0
        return ProbabilityPair(p_x, p_y)


@dataclass
class SchemeResult:
    chosen_flat_index: int
    probes_used: int
    auxiliary: ProbabilityPair | None = None


def _argmax_smallest(values: np.ndarray) -> int:
    """0-based argmax; np.argmax already returns the first maximal entry."""
    return int(np.argmax(values))


def true_optimal(codebook, chan: ChannelRealization) -> int:
    """Noiseless strongest-path argmax over the codebook; 1-based flat index."""
    gains = np.abs(codebook.codewords @ chan.strongest.steering)
    return _argmax_smallest(gains) + 1


def exhaustive_sweep(codebook, chan: ChannelRealization, noise: NoiseModel,
                     rng: np.random.Generator | None = None) -> SchemeResult:
    """Probe every codeword once and keep the strongest observation."""
    y = receive_batch(codebook.codewords, chan, noise, rng)
    return SchemeResult(_argmax_smallest(np.abs(y)) + 1, len(codebook))


def hierarchical_search(codebook: NearFieldCodebook, factor: int,
                        chan: ChannelRealization, noise: NoiseModel,
                        rng: np.random.Generator | None = None) -> SchemeResult:
    """Two-level sweep: coarse lattice first, then the winner's factor x factor cell.

    Cells are clipped at the grid boundary when ``factor`` does not divide the
    axis counts; the coarse representative is each cell's middle point. The
    cell sweep re-probes all of its points (the representative included).
    """
    if factor < 1:
        raise ValueError("coarsening factor must be >= 1")
    s_x, s_y = codebook.s_x_count, codebook.s_y_count

    def cells(count: int) -> list[tuple[int, int]]:
        return [(lo, min(lo + factor - 1, count)) for lo in range(1, count + 1, factor)]

    x_cells, y_cells = cells(s_x), cells(s_y)
    reps = [flat_index((xl + xh) // 2, (yl + yh) // 2, s_x)
            for (yl, yh) in y_cells for (xl, xh) in x_cells]
    y_coarse = receive_batch(codebook.codewords[np.array(reps) - 1], chan, noise, rng)
    win = _argmax_smallest(np.abs(y_coarse))
    yl, yh = y_cells[win // len(x_cells)]
    xl, xh = x_cells[win % len(x_cells)]
    members = [flat_index(sx, sy, s_x)
               for sy in range(yl, yh + 1) for sx in range(xl, xh + 1)]
    y_cell = receive_batch(codebook.codewords[np.array(members) - 1], chan, noise, rng)
    chosen = members[_argmax_smallest(np.abs(y_cell))]
    return SchemeResult(chosen, len(reps) + len(members))


def top_indices(p: np.ndarray, k: int) -> list[int]:
    """1-based indices of the k largest entries, descending; equal values by index."""
    p = np.asarray(p, dtype=float)
    if not 1 <= k <= p.size:
        raise ValueError(f"k={k} out of range [1, {p.size}]")
    order = np.lexsort((np.arange(p.size), -p))
    return [int(i) + 1 for i in order[:k]]


def _validated_pair(pair, s_x_count: int, s_y_count: int) -> ProbabilityPair:
    if not isinstance(pair, ProbabilityPair):
        raise PredictorContractError(f"predictor returned {type(pair).__name__}, "
                                     "expected ProbabilityPair")
    if pair.p_x.size != s_x_count or pair.p_y.size != s_y_count:
        raise PredictorContractError(
            f"predictor output lengths ({pair.p_x.size}, {pair.p_y.size}) do not match "
            f"grid ({s_x_count}, {s_y_count})")
    return pair


def select_from_pair(pair: ProbabilityPair, s_x_count: int) -> int:
    """Most likely flat index: per-axis argmax with smallest-index ties."""
    return flat_index(_argmax_smallest(pair.p_x) + 1, _argmax_smallest(pair.p_y) + 1,
                      s_x_count)


def fbt(far_codebook: FarFieldCodebook, near_codebook: NearFieldCodebook,
        predictor, chan: ChannelRealization, noise: NoiseModel,
        rng: np.random.Generator | None = None) -> SchemeResult:
    """Sweep the far-field codebook, let the predictor name the near-field codeword."""
    y = receive_batch(far_codebook.codewords, chan, noise, rng)
    pair = _validated_pair(predictor.predict(y),
                           near_codebook.s_x_count, near_codebook.s_y_count)
    return SchemeResult(select_from_pair(pair, near_codebook.s_x_count),
                        len(far_codebook), pair)


def probe_received(near_codebook: NearFieldCodebook, probe_set: ProbeSet,
                   chan: ChannelRealization, noise: NoiseModel,
                   rng: np.random.Generator | None = None) -> np.ndarray:
    """First-phase observations of the subsampled codewords, in probe-set order."""
    return receive_batch(near_codebook.codewords[probe_set.flat_indices - 1],
                         chan, noise, rng)


def pnbt(near_codebook: NearFieldCodebook, probe_set: ProbeSet, predictor,
         chan: ChannelRealization, noise: NoiseModel,
         rng: np.random.Generator | None = None) -> SchemeResult:
    """Sweep only the probe set, then select exactly as in :func:`fbt`."""
    y = probe_received(near_codebook, probe_set, chan, noise, rng)
    pair = _validated_pair(predictor.predict(y),
                           near_codebook.s_x_count, near_codebook.s_y_count)
    return SchemeResult(select_from_pair(pair, near_codebook.s_x_count),
                        len(probe_set), pair)


def candidate_sets(pair: ProbabilityPair, k_x: int, k_y: int,
                   probe_set: ProbeSet, s_x_count: int) -> tuple[list[int], list[int]]:
    """Cross-product candidates and the subset still unprobed.

    Returns (candidates, fresh) as ascending flat indices: ``candidates`` is
    the k_x * k_y cross product of the top per-axis indices; ``fresh`` removes
    the members already covered by the first-phase probe set.
    """
    lx = top_indices(pair.p_x, k_x)
    ly = top_indices(pair.p_y, k_y)
    candidates = sorted(flat_index(sx, sy, s_x_count) for sx in lx for sy in ly)
    probed = set(int(i) for i in probe_set.flat_indices)
    fresh = [s for s in candidates if s not in probed]
    return candidates, fresh


def improved_pnbt_finalize(near_codebook: NearFieldCodebook, probe_set: ProbeSet,
                           y_probe: np.ndarray, pair: ProbabilityPair,
                           k_x: int, k_y: int, chan: ChannelRealization,
                           noise: NoiseModel,
                           rng: np.random.Generator | None = None) -> SchemeResult:
    """Second phase: re-probe the unprobed candidates and keep the strongest.

    The final argmax ranges over the whole candidate set; members already
    covered by the first phase reuse their measurement instead of being
    tested again.
    """
    pair = _validated_pair(pair, near_codebook.s_x_count, near_codebook.s_y_count)
    if not 1 <= k_x <= near_codebook.s_x_count:
        raise ValueError(f"k_x={k_x} out of range [1, {near_codebook.s_x_count}]")
    if not 1 <= k_y <= near_codebook.s_y_count:
        raise ValueError(f"k_y={k_y} out of range [1, {near_codebook.s_y_count}]")
    candidates, fresh = candidate_sets(pair, k_x, k_y, probe_set, near_codebook.s_x_count)
    y_fresh = receive_batch(near_codebook.codewords[np.array(fresh, dtype=int) - 1],
                            chan, noise, rng) if fresh else np.zeros(0, dtype=complex)
    measured = dict(zip((int(i) for i in probe_set.flat_indices), y_probe))
    measured.update(zip(fresh, y_fresh))
    magnitudes = np.array([abs(measured[s]) for s in candidates])
    chosen = candidates[_argmax_smallest(magnitudes)]
    return SchemeResult(chosen, len(probe_set) + len(fresh), pair)


def improved_pnbt(near_codebook: NearFieldCodebook, probe_set: ProbeSet, predictor,
                  k_x: int, k_y: int, chan: ChannelRealization, noise: NoiseModel,
                  rng: np.random.Generator | None = None) -> SchemeResult:
    """PNBT plus a targeted second sweep of the top k_x * k_y predicted candidates."""
    y = probe_received(near_codebook, probe_set, chan, noise, rng)
    pair = _validated_pair(predictor.predict(y),
                           near_codebook.s_x_count, near_codebook.s_y_count)
    return improved_pnbt_finalize(near_codebook, probe_set, y, pair, k_x, k_y,
                                  chan, noise, rng)
