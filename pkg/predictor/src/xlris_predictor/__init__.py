"""Dual residual-network codeword predictor for the beam-training simulator.

Trains an x-axis and a y-axis classifier on the simulator's dataset
directories and serves them through its external-predictor file protocol.
This package talks to the simulator only via those documented formats; the
two codebases share no imports.
"""

from .data import BeamDataset, load_dataset, split_indices, train_eval_split
from .network import AxisNetwork, NetworkSpec, build_network
from .preprocess import canonicalize, grid_shape, preprocess, unpreprocess
from .train import TrainSpec, classification_loss, load_checkpoint, fixed_schedule, train_axis

__version__ = "0.1.0"
