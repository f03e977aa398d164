"""Figure rendering for results CSVs.

One figure per metric, each metric plotted against transmit SNR with one
labelled series per scheme. Accepts any number of CSVs in the simulator's
results schema; noiseless rows (snr_db = inf) are drawn as flat reference
lines. Styling is fixed so reruns produce identical figures.
"""

from __future__ import annotations

import argparse
import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV_COLUMNS = ("scheme", "snr_db", "n_trials", "mean_rate", "mean_norm_gain",
               "mean_eff_rate", "mean_probes")
METRICS = {
    "mean_rate": "achievable rate [bit/s/Hz]",
    "mean_norm_gain": "normalized beam gain",
    "mean_eff_rate": "effective achievable rate [bit/s/Hz]",
    "mean_probes": "pilot slots used",
}
_STYLE = ["o-", "s--", "^-.", "d:", "v-", "*--", "x-."]


def read_rows(paths) -> list[dict]:
    rows = []
    for path in paths:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != CSV_COLUMNS:
                raise ValueError(f"{path}: unexpected CSV header {header}")
            rows.extend(dict(zip(CSV_COLUMNS, r)) for r in reader)
    return rows


def render_plots(csv_paths, out_dir) -> list[Path]:
    rows = read_rows(csv_paths)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    schemes = sorted({r["scheme"] for r in rows})
    written = []
    for metric, label in METRICS.items():
        fig, ax = plt.subplots(figsize=(5.5, 4))
        for i, scheme in enumerate(schemes):
            pts = [(float(r["snr_db"]), float(r[metric])) for r in rows
                   if r["scheme"] == scheme and r[metric] != "nan"]
            finite = sorted(p for p in pts if math.isfinite(p[0])
                            and not math.isnan(p[1]))
            ref = [p[1] for p in pts if math.isinf(p[0]) and not math.isnan(p[1])]
            style = _STYLE[i % len(_STYLE)]
            if finite:
                ax.plot([p[0] for p in finite], [p[1] for p in finite], style,
                        label=scheme)
            if ref:
                ax.axhline(ref[0], ls=":", color=f"C{i}", alpha=0.7,
                           label=f"{scheme} (noiseless)" if not finite else None)
        ax.set_xlabel("transmit SNR [dB]")
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
        if schemes:
            ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"{metric}.png"
        fig.savefig(path, dpi=130)
        plt.close(fig)
        written.append(path)
    return written


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="render metric figures from results CSVs")
    parser.add_argument("csvs", nargs="+")
    parser.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    for path in render_plots(args.csvs, args.out):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
