"""Training loop for the per-axis networks.

Cross-entropy is taken in log base 10, so reported losses are a constant
1/ln(10) multiple of the natural-log value. The learning rate starts at
0.005 and halves whenever eval-split accuracy fails to improve for two
consecutive epochs. By default each epoch visits every training sample once
in a reshuffled order; ``fixed_schedule`` restores the fixed 2000-batches-
of-9 regime instead.

Inputs are raw real/imaginary planes by default. The optional
``strongest-entry-gauge`` normalization divides each sample by its largest
entry; it helps nothing at clean SNR and makes predictions *more* noise
sensitive on long probe vectors (the anchor is an extreme value over Q noisy
draws), so it is off unless explicitly requested.

Checkpoints bundle the network weights with everything inference needs:
depth, head dimension, probe length and the normalization tag.
"""

from __future__ import annotations

import argparse
import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F

from .data import BeamDataset, load_dataset, train_eval_split
from .network import NetworkSpec, build_network
from .preprocess import canonicalize, preprocess

CHECKPOINT_VERSION = 1


NORMALIZATIONS = ("strongest-entry-gauge", "none")


@dataclass
class TrainSpec:
    initial_lr: float = 0.005
    plateau_epochs: int = 2
    lr_decay: float = 0.5
    epochs: int = 120
    batch_size: int = 32
    batches_per_epoch: int | None = None  # None: one pass over the training split
    loss_log_base: float = 10.0
    train_fraction: float = 0.9
    normalization: str = "none"

    def __post_init__(self):
        if min(self.initial_lr, self.lr_decay, self.epochs, self.batch_size,
               self.plateau_epochs) <= 0:
            raise ValueError("training hyperparameters must be positive")
        if not 0 < self.lr_decay < 1:
            raise ValueError("lr_decay must lie in (0, 1)")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {NORMALIZATIONS}")


def fixed_schedule(**overrides) -> TrainSpec:
    """Fixed 2000-batches-of-9 epochs regardless of dataset size."""
    base = dict(batches_per_epoch=2000, batch_size=9)
    base.update(overrides)
    return TrainSpec(**base)


def classification_loss(logits: torch.Tensor, target: torch.Tensor,
                        log_base: float = 10.0) -> torch.Tensor:
    """Cross-entropy with the log taken in ``log_base``."""
    return F.cross_entropy(logits, target) / math.log(log_base)


def tensorize(features, normalization: str = "none") -> torch.Tensor:
    if normalization == "strongest-entry-gauge":
        features = canonicalize(features)
    elif normalization != "none":
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    return torch.from_numpy(preprocess(features))


def train_axis(dataset_dir, axis: str, net_spec: NetworkSpec | None = None,
               train_spec: TrainSpec | None = None, seed: int = 0,
               out_dir=None, quiet: bool = False) -> dict:
    """Train one axis network; returns the checkpoint dict (saved when out_dir set)."""
    train_spec = train_spec or TrainSpec()
    dataset = load_dataset(dataset_dir)
    net_spec = net_spec or NetworkSpec(18, dataset.head_dim(axis))
    if net_spec.head_dim != dataset.head_dim(axis):
        raise ValueError(f"head_dim {net_spec.head_dim} does not match the dataset "
                         f"grid ({dataset.head_dim(axis)} classes on axis {axis})")

    train_ds, eval_ds = train_eval_split(dataset, train_spec.train_fraction)
    if len(train_ds) == 0:
        # tiny datasets: train on everything, skip validation
        train_ds, eval_ds = dataset, eval_ds
    x_train = tensorize(train_ds.features, train_spec.normalization)
    y_train = torch.from_numpy(train_ds.axis_classes(axis))
    x_eval = tensorize(eval_ds.features, train_spec.normalization)
    y_eval = torch.from_numpy(eval_ds.axis_classes(axis))

    torch.manual_seed(seed)
    net = build_network(net_spec)
    optimizer = torch.optim.Adam(net.parameters(), lr=train_spec.initial_lr)
    generator = torch.Generator().manual_seed(seed)

    n_train = len(train_ds)
    batches = train_spec.batches_per_epoch
    if batches is None:
        batches = max(1, math.ceil(n_train / train_spec.batch_size))

    history = []
    best_acc = -1.0
    bad_epochs = 0
    lr = train_spec.initial_lr
    start = time.monotonic()
    # A single-sample training split would give batch norm zero variance per
    # channel; run normalization on its (frozen) running statistics instead.
    frozen_norm = n_train < 2
    offsets = torch.arange(train_spec.batch_size)
    for epoch in range(1, train_spec.epochs + 1):
        net.eval() if frozen_norm else net.train()
        order = torch.randperm(n_train, generator=generator)
        losses = []
        for b in range(batches):
            lo = b * train_spec.batch_size
            idx = order[(lo + offsets) % n_train]  # wrap: batches stay full-size
            logits = net(x_train[idx])
            loss = classification_loss(logits, y_train[idx], train_spec.loss_log_base)
            if not torch.isfinite(loss):
                raise RuntimeError(f"non-finite loss at epoch {epoch}")
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            losses.append(float(loss.detach()))

        net.eval()
        with torch.no_grad():
            acc = 0.0
            if len(eval_ds):
                pred = net(x_eval).argmax(dim=1)
                acc = float((pred == y_eval).float().mean())
        history.append({"epoch": epoch, "train_loss": float(np.mean(losses)),
                        "val_acc": acc, "lr": lr})
        if not quiet:
            print(f"[{axis}] epoch {epoch:3d} loss {history[-1]['train_loss']:.4f} "
                  f"val_acc {acc:.3f} lr {lr:.5f}", flush=True)

        if acc > best_acc:
            best_acc = acc
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= train_spec.plateau_epochs:
                lr *= train_spec.lr_decay
                for group in optimizer.param_groups:
                    group["lr"] = lr
                bad_epochs = 0

    checkpoint = {
        "version": CHECKPOINT_VERSION,
        "axis": axis,
        "depth": net_spec.depth,
        "head_dim": net_spec.head_dim,
        "q": dataset.q,
        "normalization": train_spec.normalization,
        "state_dict": net.state_dict(),
        "history": history,
        "seed": seed,
        "train_seconds": time.monotonic() - start,
    }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        torch.save(checkpoint, out_dir / f"model_{axis}.pt")
        with open(out_dir / f"loss_{axis}.csv", "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["epoch", "train_loss", "val_acc", "lr"],
                                    lineterminator="\n")
            writer.writeheader()
            writer.writerows(history)
    return checkpoint


def load_checkpoint(path) -> tuple[torch.nn.Module, dict]:
    checkpoint = torch.load(path, map_location="cpu", weights_only=False)
    net = build_network(NetworkSpec(checkpoint["depth"], checkpoint["head_dim"]))
    net.load_state_dict(checkpoint["state_dict"])
    net.eval()
    return net, checkpoint


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="train one axis network")
    parser.add_argument("--dataset", required=True)
    parser.add_argument("--axis", choices=("x", "y", "both"), default="both")
    parser.add_argument("--depth", type=int, choices=(18, 50), default=18)
    parser.add_argument("--epochs", type=int, default=TrainSpec.epochs)
    parser.add_argument("--batch-size", type=int, default=TrainSpec.batch_size)
    parser.add_argument("--lr", type=float, default=TrainSpec.initial_lr)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fixed-schedule", action="store_true",
                        help="fixed 2000 batches of 9 per epoch")
    parser.add_argument("--normalization", choices=NORMALIZATIONS, default="none",
                        help="optional per-sample gauge normalization of the inputs")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)

    if args.fixed_schedule:
        spec = fixed_schedule(epochs=args.epochs, initial_lr=args.lr,
                              normalization=args.normalization)
    else:
        spec = TrainSpec(epochs=args.epochs, batch_size=args.batch_size,
                         initial_lr=args.lr, normalization=args.normalization)
    axes = ("x", "y") if args.axis == "both" else (args.axis,)
    for axis in axes:
        dataset = load_dataset(args.dataset)
        net_spec = NetworkSpec(args.depth, dataset.head_dim(axis))
        train_axis(args.dataset, axis, net_spec, spec, args.seed, args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
