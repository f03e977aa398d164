"""Experiment orchestration: dataset generation, scheme evaluation, CSV tooling.

Subcommands
-----------
* ``generate`` — write a labelled dataset directory.
* ``evaluate`` — Monte-Carlo sweep of schemes over SNR points, CSV out.
* ``compare``  — merge several results CSVs into one.
* ``inspect``  — print a dataset manifest.

A ``--config`` JSON file overrides command-line flags, and the ``XLRIS_SEED``
environment variable overrides every other seed source. Results CSVs have the
fixed column set ``scheme, snr_db, n_trials, mean_rate, mean_norm_gain,
mean_eff_rate, mean_probes`` and are byte-identical across reruns with the
same configuration.

External predictors are separate processes invoked once per (scheme, snr)
cell with two directory arguments appended to their command: a request
directory (``manifest.json`` + ``features.bin``, same binary conventions as
datasets) and a response directory where they must leave ``probs_x.bin``
(n x s_x_count) and ``probs_y.bin`` (n x s_y_count), little-endian float32,
row-major, each row a probability vector.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import NoiseModel, receive_batch, sample_channel
from .codebook import build_far_field_codebook, build_near_field_codebook, subsample
from .config import PRESETS, SystemConfig
from .dataset import DatasetManifest, encode_features, generate_dataset
from .metrics import TrialMetrics, achievable_rate, effective_rate, normalized_gain
from .rng import STREAM_TRIAL_CHANNEL, STREAM_TRIAL_NOISE, derive_rng
from .schemes import (OneHotOracle, PredictorContractError, ProbabilityPair,
                      SchemeResult, UniformStub, exhaustive_sweep,
                      hierarchical_search, improved_pnbt_finalize, probe_received,
                      select_from_pair, true_optimal)

SCHEME_NAMES = ("exhaustive", "hierarchical", "fbt", "pnbt", "improved_pnbt")
CSV_COLUMNS = ("scheme", "snr_db", "n_trials", "mean_rate", "mean_norm_gain",
               "mean_eff_rate", "mean_probes")
REQUEST_VERSION = 1


class ExternalPredictorError(RuntimeError):
    """Base for external-predictor protocol violations."""


class PredictorProcessError(ExternalPredictorError):
    """The predictor process exited with a nonzero status."""


class PredictorResponseMissing(ExternalPredictorError):
    """A required response file was not produced."""


class PredictorShapeError(ExternalPredictorError):
    """Response arrays do not match the request's row count or grid."""


class PredictorNormalizationError(ExternalPredictorError):
    """Response rows are not valid probability vectors."""


@dataclass
class ExperimentConfig:
    system: SystemConfig
    schemes: list[str] = field(default_factory=lambda: ["exhaustive"])
    snr_db: list[float | None] = field(default_factory=lambda: [10.0])
    n_trials: int = 100
    seed: int = 0
    predictor: str | list[str] = "uniform"
    probe_interval: int = 20
    k_x: int = 2
    k_y: int = 5
    coarse_factor: int = 5
    t_total: int = 3000
    output: str | None = None
    # generate-only fields
    n_samples: int = 1000
    probe_type: str = "near_subsampled"

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError("n_trials must be >= 1")
        if not self.snr_db:
            raise ValueError("snr_db list must be nonempty")
        for s in self.schemes:
            if s not in SCHEME_NAMES:
                raise ValueError(f"unknown scheme {s!r}; valid: {SCHEME_NAMES}")


def _sigma2(snr_db: float | None) -> float:
    return 0.0 if snr_db is None else 10.0 ** (-float(snr_db) / 10.0)


# --- external predictor protocol ----------------------------------------------

def write_request(features: np.ndarray, s_x_count: int, s_y_count: int,
                  request_dir) -> Path:
    request_dir = Path(request_dir)
    request_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"version": REQUEST_VERSION, "n_samples": int(features.shape[0]),
                "q": int(features.shape[1]), "s_x_count": int(s_x_count),
                "s_y_count": int(s_y_count)}
    (request_dir / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n",
                                               encoding="utf-8")
    (request_dir / "features.bin").write_bytes(encode_features(features))
    return request_dir


def _read_prob_matrix(path: Path, n_rows: int, n_cols: int, name: str) -> np.ndarray:
    if not path.exists():
        raise PredictorResponseMissing(f"predictor did not write {path.name}")
    raw = np.frombuffer(path.read_bytes(), dtype="<f4")
    if raw.size != n_rows * n_cols:
        raise PredictorShapeError(
            f"{path.name} holds {raw.size} values, expected {n_rows}x{n_cols}")
    mat = raw.reshape(n_rows, n_cols).astype(float)
    if np.any(mat < -1e-6):
        raise PredictorNormalizationError(f"{name} rows contain negative entries")
    mat = np.clip(mat, 0.0, None)
    sums = mat.sum(axis=1)
    bad = np.abs(sums - 1.0) > 1e-4
    if np.any(bad):
        i = int(np.argmax(bad))
        raise PredictorNormalizationError(
            f"{name} row {i} sums to {sums[i]:.6f}, outside 1 +/- 1e-4")
    return mat / sums[:, None]


def external_predict(command: list[str], features: np.ndarray,
                     s_x_count: int, s_y_count: int, workdir) -> list[ProbabilityPair]:
    """Run one batched request/response round trip against a predictor process."""
    workdir = Path(workdir)
    request = write_request(features, s_x_count, s_y_count, workdir / "request")
    response = workdir / "response"
    response.mkdir(parents=True, exist_ok=True)
    proc = subprocess.run(list(command) + [str(request), str(response)],
                          capture_output=True, text=True)
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-5:]
        raise PredictorProcessError(
            f"predictor exited with status {proc.returncode}: " + " | ".join(tail))
    n = features.shape[0]
    p_x = _read_prob_matrix(response / "probs_x.bin", n, s_x_count, "probs_x")
    p_y = _read_prob_matrix(response / "probs_y.bin", n, s_y_count, "probs_y")
    return [ProbabilityPair(p_x[i], p_y[i]) for i in range(n)]


# --- evaluation ----------------------------------------------------------------

def _predict_batch(config: ExperimentConfig, features: np.ndarray, near,
                   channels) -> list[ProbabilityPair]:
    binding = config.predictor
    if binding == "uniform":
        stub = UniformStub(near.s_x_count, near.s_y_count)
        return [stub.predict(y) for y in features]
    if binding == "onehot":
        return [OneHotOracle.for_channel(near, chan).predict(y)
                for y, chan in zip(features, channels)]
    if isinstance(binding, str):
        binding = shlex.split(binding)
    with tempfile.TemporaryDirectory(prefix="xlris-predict-") as tmp:
        return external_predict(binding, features, near.s_x_count, near.s_y_count, tmp)


def _run_cell(config: ExperimentConfig, scheme: str, cell_index: int,
              sigma2: float, near, far, probe_set, channels) -> list[SchemeResult]:
    noise = NoiseModel(sigma2)

    def trial_rng(t: int):
        return derive_rng(config.seed, STREAM_TRIAL_NOISE, (cell_index << 32) + t)

    if scheme == "exhaustive":
        return [exhaustive_sweep(near, chan, noise, trial_rng(t))
                for t, chan in enumerate(channels)]
    if scheme == "hierarchical":
        return [hierarchical_search(near, config.coarse_factor, chan, noise, trial_rng(t))
                for t, chan in enumerate(channels)]

    # Predictor-driven schemes: probe every trial first, predict in one batch,
    # then finish each trial with the same generator it probed with.
    rngs = [trial_rng(t) for t in range(len(channels))]
    if scheme == "fbt":
        features = np.stack([receive_batch(far.codewords, chan, noise, rngs[t])
                             for t, chan in enumerate(channels)])
        pairs = _predict_batch(config, features, near, channels)
        return [SchemeResult(select_from_pair(pair, near.s_x_count), len(far), pair)
                for pair in pairs]
    features = np.stack([probe_received(near, probe_set, chan, noise, rngs[t])
                         for t, chan in enumerate(channels)])
    pairs = _predict_batch(config, features, near, channels)
    if scheme == "pnbt":
        return [SchemeResult(select_from_pair(pair, near.s_x_count), len(probe_set), pair)
                for pair in pairs]
    return [improved_pnbt_finalize(near, probe_set, features[t], pairs[t],
                                   config.k_x, config.k_y, chan, noise, rngs[t])
            for t, chan in enumerate(channels)]


def run_evaluate(config: ExperimentConfig) -> list[dict]:
    """Monte-Carlo evaluation; returns one row dict per (scheme, snr) cell."""
    system = config.system
    near = build_near_field_codebook(system.grid, system.ris, system.g_scatter,
                                     system.user_height, system.phase_mode)
    far = build_far_field_codebook(system.ris) if "fbt" in config.schemes else None
    probe_set = subsample(len(near), config.probe_interval)

    channels = [sample_channel(system, derive_rng(config.seed, STREAM_TRIAL_CHANNEL, t))
                for t in range(config.n_trials)]
    optimal_cw = []
    for chan in channels:
        s = true_optimal(near, chan)
        chan.true_optimal_flat_index = s
        optimal_cw.append(near.codewords[s - 1])

    rows = []
    for si, scheme in enumerate(config.schemes):
        for gi, snr in enumerate(config.snr_db):
            sigma2 = _sigma2(snr)
            cell_index = si * len(config.snr_db) + gi
            results = _run_cell(config, scheme, cell_index, sigma2, near, far,
                                probe_set, channels)
            trials = []
            for t, res in enumerate(results):
                chosen_cw = near.codewords[res.chosen_flat_index - 1]
                gain = normalized_gain(chosen_cw, optimal_cw[t], channels[t])
                if sigma2 > 0:
                    rate = achievable_rate(chosen_cw, channels[t], sigma2)
                    eff = effective_rate(rate, res.probes_used, config.t_total)
                else:
                    rate = eff = math.nan
                trials.append(TrialMetrics(rate, gain, eff, res.probes_used))
            rows.append({
                "scheme": scheme,
                "snr_db": math.inf if snr is None else float(snr),
                "n_trials": config.n_trials,
                "mean_rate": float(np.mean([m.achievable_rate for m in trials])),
                "mean_norm_gain": float(np.mean([m.normalized_gain for m in trials])),
                "mean_eff_rate": float(np.mean([m.effective_rate for m in trials])),
                "mean_probes": float(np.mean([m.probes_used for m in trials])),
            })
    if config.output:
        write_results_csv(rows, config.output)
    return rows


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def write_results_csv(rows: list[dict], path) -> Path:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in CSV_COLUMNS])
    return path


def read_results_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {header}")
        return [dict(zip(CSV_COLUMNS, row)) for row in reader]


# --- generation ------------------------------------------------------------------

def run_generate(config: ExperimentConfig, out_dir) -> Path:
    """Generate a dataset from the experiment configuration's system block."""
    snr = config.snr_db[0]
    if config.probe_type == "far_field":
        manifest = DatasetManifest.far_field(config.system, snr, config.n_samples,
                                             config.seed)
    else:
        manifest = DatasetManifest.near_subsampled(config.system, config.probe_interval,
                                                   snr, config.n_samples, config.seed)
    path = generate_dataset(manifest, out_dir)
    print(f"wrote {manifest.n_samples} samples (probe_type={manifest.probe_type}, "
          f"q={manifest.q}, grid {manifest.s_x_count}x{manifest.s_y_count}) to {path}")
    return path


def run_inspect(path) -> None:
    ds_dir = Path(path)
    manifest = json.loads((ds_dir / "manifest.json").read_text(encoding="utf-8"))

    def emit(prefix, obj):
        for key, val in obj.items():
            if isinstance(val, dict):
                emit(f"{prefix}{key}.", val)
            else:
                print(f"{prefix}{key}: {val}")

    emit("", manifest)
    for name in ("features.bin", "labels.bin"):
        f = ds_dir / name
        print(f"{name}: {f.stat().st_size} bytes" if f.exists() else f"{name}: MISSING")


def run_compare(paths: list, output) -> Path:
    rows = []
    for p in paths:
        rows.extend(read_results_csv(p))
    rows.sort(key=lambda r: (r["scheme"], float(r["snr_db"])))
    path = Path(output)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row[c] for c in CSV_COLUMNS])
    return path


# --- argument handling -------------------------------------------------------------

def _parse_snr_token(token: str) -> float | None:
    if token.strip().lower() in ("inf", "noiseless", "none"):
        return None
    return float(token)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS), default=None,
                        help="bundled system configuration (default: desk)")
    parser.add_argument("--config", default=None,
                        help="JSON config file; its values override flags")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--probe-interval", type=int, default=None,
                        help="near-field probe subsampling interval")
    parser.add_argument("--phase-mode", choices=("physical", "spacing_scaled"),
                        default=None)


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Merge precedence: preset defaults < flags < config file < XLRIS_SEED."""
    file_cfg = {}
    if args.config:
        file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))

    preset = file_cfg.get("preset") or args.preset or "desk"
    if "system" in file_cfg:
        system = SystemConfig.from_dict(file_cfg["system"])
    else:
        system = PRESETS[preset]()
    phase_mode = file_cfg.get("phase_mode", getattr(args, "phase_mode", None))
    if phase_mode is not None and phase_mode != system.phase_mode:
        system = replace(system, phase_mode=phase_mode)

    merged = {}
    flag_fields = ("seed", "n_trials", "snr_db", "schemes", "probe_interval",
                   "k_x", "k_y", "coarse_factor", "t_total", "predictor", "output",
                   "n_samples", "probe_type")
    for name in flag_fields:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    for name in flag_fields:
        if name in file_cfg and file_cfg[name] is not None:
            merged[name] = file_cfg[name]
    if "snr_db" in merged and isinstance(merged["snr_db"], str):
        merged["snr_db"] = [_parse_snr_token(t) for t in merged["snr_db"].split(",")]
    if "snr_db" in merged and isinstance(merged["snr_db"], (int, float)):
        merged["snr_db"] = [float(merged["snr_db"])]
    if "schemes" in merged and isinstance(merged["schemes"], str):
        merged["schemes"] = [s.strip() for s in merged["schemes"].split(",")]

    env_seed = os.environ.get("XLRIS_SEED")
    if env_seed is not None:
        merged["seed"] = int(env_seed)

    return ExperimentConfig(system=system, **merged)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="xlris",
                                     description="Near-field beam-training experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate a labelled dataset directory")
    _add_common(p_gen)
    p_gen.add_argument("--n-samples", type=int, default=None)
    p_gen.add_argument("--probe-type", choices=("far_field", "near_subsampled"),
                       default=None)
    p_gen.add_argument("--snr-db", dest="snr_db", default=None,
                       help="training SNR in dB, or 'noiseless'")
    p_gen.add_argument("--out", required=True)

    p_eval = sub.add_parser("evaluate", help="Monte-Carlo scheme evaluation")
    _add_common(p_eval)
    p_eval.add_argument("--n-trials", type=int, default=None)
    p_eval.add_argument("--snr-db", dest="snr_db", default=None,
                        help="comma-separated SNR list; 'noiseless' entries allowed")
    p_eval.add_argument("--schemes", default=None,
                        help=f"comma-separated subset of {','.join(SCHEME_NAMES)}")
    p_eval.add_argument("--k-x", dest="k_x", type=int, default=None)
    p_eval.add_argument("--k-y", dest="k_y", type=int, default=None)
    p_eval.add_argument("--coarse-factor", dest="coarse_factor", type=int, default=None)
    p_eval.add_argument("--t-total", dest="t_total", type=int, default=None)
    p_eval.add_argument("--predictor", default=None,
                        help="'uniform', 'onehot', or an external command line")
    p_eval.add_argument("--output", default=None,
                        help="results CSV path (may also come from --config)")

    p_cmp = sub.add_parser("compare", help="merge results CSVs")
    p_cmp.add_argument("csvs", nargs="+")
    p_cmp.add_argument("--output", required=True)

    p_ins = sub.add_parser("inspect", help="print a dataset manifest")
    p_ins.add_argument("dataset_dir")

    args = parser.parse_args(argv)
    if args.command == "inspect":
        run_inspect(args.dataset_dir)
        return 0
    if args.command == "compare":
        path = run_compare(args.csvs, args.output)
        print(f"wrote {path}")
        return 0

    config = build_config(args)
    if args.command == "generate":
        run_generate(config, args.out)
        return 0
    if config.output is None:
        parser.error("evaluate needs --output (or an 'output' entry in --config)")
    try:
        rows = run_evaluate(config)
    except (ExternalPredictorError, PredictorContractError) as exc:
        print(f"predictor contract violated: {exc}", file=sys.stderr)
        return 2
    for row in rows:
        print(f"{row['scheme']:>14} snr={_format_cell(row['snr_db']):>8} "
              f"gain={row['mean_norm_gain']:.4f} probes={row['mean_probes']:.1f}")
    if config.output:
        print(f"wrote {config.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
