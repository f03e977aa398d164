"""Construction, indexing and caching of the beam codebooks.

Codewords are stored conjugated, so a probe is the plain (transpose) dot
product ``codeword^T steering``. Far-field codewords live on the standard
DFT spatial-frequency grid; near-field codewords on a rectangular position
lattice in front of the panel, flat-ordered y-major (x varies fastest).
All indices exposed here are 1-based.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .channel import effective_near_field_steering, far_field_steering
from .config import GridSpec
from .geometry import ArrayGeometry, Position3D


def flat_index(s_x: int, s_y: int, s_x_count: int, s_y_count: int | None = None) -> int:
    """Flat 1-based codeword index for grid point (s_x, s_y)."""
    if not 1 <= s_x <= s_x_count:
        raise ValueError(f"s_x={s_x} out of range [1, {s_x_count}]")
    if s_y < 1 or (s_y_count is not None and s_y > s_y_count):
        raise ValueError(f"s_y={s_y} out of range")
    return (s_y - 1) * s_x_count + s_x


def index_pair(s: int, s_x_count: int, total: int | None = None) -> tuple[int, int]:
    """Inverse of :func:`flat_index`: flat index -> (s_x, s_y), all 1-based."""
    if s < 1 or (total is not None and s > total):
        raise ValueError(f"flat index {s} out of range")
    return (s - 1) % s_x_count + 1, (s - 1) // s_x_count + 1


@dataclass
class FarFieldCodebook:
    """DFT-grid codebook; row t of ``grid`` holds that codeword's (u, v) pair."""

    codewords: np.ndarray  # (n_rows*n_cols, N) complex
    grid: np.ndarray       # (n_rows*n_cols, 2) spatial frequencies

    def __len__(self) -> int:
        return self.codewords.shape[0]


@dataclass
class NearFieldCodebook:
    """Position-grid codebook over an x-y lattice at fixed user height."""

    codewords: np.ndarray  # (s_x_count*s_y_count, N) complex
    s_x_count: int
    s_y_count: int
    delta_x: float
    delta_y: float
    x_min: float
    y_min: float
    g_scatter: Position3D
    user_height: float

    def __len__(self) -> int:
        return self.codewords.shape[0]

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.s_x_count, self.s_y_count, self.delta_x, self.delta_y,
                        self.x_min, self.y_min)

    def point_for(self, s: int) -> Position3D:
        s_x, s_y = index_pair(s, self.s_x_count, len(self))
        return self.grid.point(s_x, s_y, self.user_height)


@dataclass(frozen=True)
class ProbeSet:
    """Equally spaced 1-based codeword indices swept in the first training phase."""

    flat_indices: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.flat_indices, dtype=np.int64)
        if idx.size and (np.any(np.diff(idx) <= 0) or idx[0] < 1):
            raise ValueError("probe indices must be strictly increasing and >= 1")
        object.__setattr__(self, "flat_indices", idx)

    def __len__(self) -> int:
        return self.flat_indices.size


def build_far_field_codebook(geom: ArrayGeometry) -> FarFieldCodebook:
    """One codeword per element: u over n_rows values, v over n_cols, u-major order.

    The u grid is (2n - n_rows - 1)/n_rows, n = 1..n_rows (symmetric about 0
    for even counts, containing 0 for odd); likewise for v with n_cols.
    """
    u = (2 * np.arange(1, geom.n_rows + 1) - geom.n_rows - 1) / geom.n_rows
    v = (2 * np.arange(1, geom.n_cols + 1) - geom.n_cols - 1) / geom.n_cols
    pairs = np.column_stack([np.repeat(u, geom.n_cols), np.tile(v, geom.n_rows)])
    codewords = np.stack([np.conj(far_field_steering(uu, vv, geom)) for uu, vv in pairs])
    return FarFieldCodebook(codewords, pairs)


def build_near_field_codebook(grid: GridSpec, geom: ArrayGeometry,
                              g_scatter: Position3D, user_height: float = 0.0,
                              phase_mode: str = "physical") -> NearFieldCodebook:
    """Conjugated cascaded steering vector at every lattice point."""
    points = grid.points(user_height)
    steering = effective_near_field_steering(points, g_scatter, geom, phase_mode)
    return NearFieldCodebook(np.conj(steering), grid.s_x_count, grid.s_y_count,
                             grid.delta_x, grid.delta_y, grid.x_min, grid.y_min,
                             g_scatter, user_height)


def subsample(total: int, interval: int) -> ProbeSet:
    """Every ``interval``-th codeword: indices {interval, 2*interval, ...}."""
    interval = int(interval)
    if interval < 1:
        raise ValueError("sampling interval must be >= 1")
    count = total // interval
    if count == 0:
        warnings.warn(f"sampling interval {interval} exceeds codebook size {total}; "
                      "probe set is empty")
    return ProbeSet(np.arange(1, count + 1, dtype=np.int64) * interval)


# --- caching -----------------------------------------------------------------
#
# Same layout as the dataset directory format (JSON header + raw little-endian
# interleaved re/im, row-major), but with 64-bit floats: codeword phases must
# survive a cache round trip at the 1e-12 level.

def save_codebook(cb: FarFieldCodebook | NearFieldCodebook, path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    if isinstance(cb, NearFieldCodebook):
        header = {"kind": "near_field", "s_x_count": cb.s_x_count, "s_y_count": cb.s_y_count,
                  "delta_x": cb.delta_x, "delta_y": cb.delta_y,
                  "x_min": cb.x_min, "y_min": cb.y_min,
                  "g_scatter": [cb.g_scatter.x, cb.g_scatter.y, cb.g_scatter.z],
                  "user_height": cb.user_height}
    else:
        header = {"kind": "far_field", "grid": cb.grid.tolist()}
    header["n_codewords"], header["n_elements"] = cb.codewords.shape
    header["dtype"] = "complex128-interleaved-le"
    (path / "header.json").write_text(json.dumps(header, indent=1), encoding="utf-8")
    flat = np.empty(cb.codewords.shape + (2,), dtype="<f8")
    flat[..., 0] = cb.codewords.real
    flat[..., 1] = cb.codewords.imag
    (path / "codewords.bin").write_bytes(flat.tobytes())
    return path


def load_codebook(path) -> FarFieldCodebook | NearFieldCodebook:
    path = Path(path)
    header = json.loads((path / "header.json").read_text(encoding="utf-8"))
    raw = np.frombuffer((path / "codewords.bin").read_bytes(), dtype="<f8")
    raw = raw.reshape(header["n_codewords"], header["n_elements"], 2)
    codewords = raw[..., 0] + 1j * raw[..., 1]
    if header["kind"] == "near_field":
        return NearFieldCodebook(codewords, header["s_x_count"], header["s_y_count"],
                                 header["delta_x"], header["delta_y"],
                                 header["x_min"], header["y_min"],
                                 Position3D(*header["g_scatter"]), header["user_height"])
    return FarFieldCodebook(codewords, np.asarray(header["grid"], dtype=float))
