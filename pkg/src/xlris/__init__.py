"""Near-field beam training for extremely large reconfigurable intelligent surfaces.

The package simulates the cascaded panel-assisted link, builds far-field and
near-field beam codebooks, runs the beam-training schemes against pluggable
codeword predictors, generates labelled datasets deterministically, and
scores everything with the standard rate/gain metrics. See the ``demos/``
scripts for guided tours and ``xlris --help`` for the experiment CLI.
"""

from .channel import (ChannelRealization, NoiseModel, PathTerm,
                      direction_for_spatial_frequencies,
                      effective_near_field_steering, far_field_steering,
                      near_field_steering, receive_batch, received_signal,
                      sample_channel, spatial_frequencies_for_direction)
from .codebook import (FarFieldCodebook, NearFieldCodebook, ProbeSet,
                       build_far_field_codebook, build_near_field_codebook,
                       flat_index, index_pair, load_codebook, save_codebook,
                       subsample)
from .config import GridSpec, Region, SystemConfig, desk_scale, full_scale
from .dataset import (Dataset, DatasetManifest, TrainingSample, generate_dataset,
                      load_dataset, save_dataset, split)
from .geometry import (ArrayGeometry, Position3D, aperture, element_positions,
                       rayleigh_distance)
from .metrics import TrialMetrics, achievable_rate, effective_rate, normalized_gain
from .rng import derive_rng
from .schemes import (OneHotOracle, PredictorContractError, ProbabilityPair,
                      SchemeResult, UniformStub, exhaustive_sweep, fbt,
                      hierarchical_search, improved_pnbt, pnbt, top_indices,
                      true_optimal)

__version__ = "0.1.0"
