"""Batch inference implementing the simulator's external-predictor protocol.

Invoked as ``python -m xlris_predictor.infer --model-dir RUN <request_dir>
<response_dir>``: reads ``manifest.json`` + ``features.bin`` from the request
directory, runs both axis networks, and writes ``probs_x.bin`` /
``probs_y.bin`` (little-endian float32, row-major, softmax rows). Inference
is deterministic: single-threaded CPU with deterministic kernels, so
repeated runs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import torch

from .train import load_checkpoint, tensorize


def read_request(request_dir) -> tuple[dict, np.ndarray]:
    request_dir = Path(request_dir)
    manifest = json.loads((request_dir / "manifest.json").read_text(encoding="utf-8"))
    n, q = int(manifest["n_samples"]), int(manifest["q"])
    raw = np.frombuffer((request_dir / "features.bin").read_bytes(), dtype="<f4")
    if raw.size != n * q * 2:
        raise ValueError(f"features.bin holds {raw.size} floats, expected {n * q * 2}")
    raw = raw.reshape(n, q, 2)
    return manifest, (raw[..., 0] + 1j * raw[..., 1]).astype(np.complex64)


def softmax_rows(logits: torch.Tensor) -> np.ndarray:
    return torch.softmax(logits, dim=1).numpy().astype("<f4")


def run(model_dir, request_dir, response_dir, batch_size: int = 256) -> None:
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)
    model_dir = Path(model_dir)
    manifest, features = read_request(request_dir)

    nets = {}
    normalizations = set()
    for axis, expected in (("x", int(manifest["s_x_count"])),
                           ("y", int(manifest["s_y_count"]))):
        net, checkpoint = load_checkpoint(model_dir / f"model_{axis}.pt")
        if checkpoint["head_dim"] != expected:
            raise ValueError(f"{axis}-axis checkpoint has {checkpoint['head_dim']} "
                             f"classes, request expects {expected}")
        if checkpoint["q"] != int(manifest["q"]):
            raise ValueError(f"{axis}-axis checkpoint was trained on q={checkpoint['q']}, "
                             f"request has q={manifest['q']}")
        nets[axis] = net
        normalizations.add(checkpoint["normalization"])
    if len(normalizations) != 1:
        raise ValueError(f"checkpoints disagree on normalization: {normalizations}")

    tensor = tensorize(features, normalizations.pop())
    response_dir = Path(response_dir)
    response_dir.mkdir(parents=True, exist_ok=True)
    with torch.no_grad():
        for axis, name in (("x", "probs_x.bin"), ("y", "probs_y.bin")):
            chunks = [softmax_rows(nets[axis](tensor[lo:lo + batch_size]))
                      for lo in range(0, tensor.shape[0], batch_size)]
            rows = np.concatenate(chunks) if chunks else np.zeros((0, 0), dtype="<f4")
            (response_dir / name).write_bytes(rows.tobytes())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="external-predictor inference")
    parser.add_argument("--model-dir", required=True)
    parser.add_argument("request_dir")
    parser.add_argument("response_dir")
    args = parser.parse_args(argv)
    try:
        run(args.model_dir, args.request_dir, args.response_dir)
    except Exception as exc:  # nonzero exit with a message, per the protocol
        print(f"inference failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
