"""System configuration shared by the channel, codebook and dataset layers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .geometry import ArrayGeometry, Position3D

PHASE_MODES = ("physical", "spacing_scaled")


@dataclass(frozen=True)
class Region:
    """Axis-aligned sampling box; a degenerate axis (lo == hi) pins that coordinate."""

    x: tuple[float, float]
    y: tuple[float, float]
    z: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        for name, (lo, hi) in (("x", self.x), ("y", self.y), ("z", self.z)):
            if lo > hi:
                raise ValueError(f"empty region on {name}-axis: ({lo}, {hi})")

    def sample(self, rng: np.random.Generator) -> Position3D:
        # One uniform draw per axis even when degenerate, so the rng stream
        # layout does not depend on which axes are pinned.
        x = rng.uniform(*self.x)
        y = rng.uniform(*self.y)
        z = rng.uniform(*self.z)
        return Position3D(float(x), float(y), float(z))


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling lattice for the position codebook.

    Point (s_x, s_y), 1-based, sits at x_min + (s_x-1)*delta_x and
    y_min + (s_y-1)*delta_y; flat order is y-major (x varies fastest).
    """

    s_x_count: int
    s_y_count: int
    delta_x: float
    delta_y: float
    x_min: float
    y_min: float

    def __post_init__(self):
        if self.s_x_count < 1 or self.s_y_count < 1:
            raise ValueError("grid needs at least one point per axis")
        if self.delta_x <= 0 or self.delta_y <= 0:
            raise ValueError("grid spacing must be positive")

    @property
    def n_points(self) -> int:
        return self.s_x_count * self.s_y_count

    def point(self, s_x: int, s_y: int, z: float = 0.0) -> Position3D:
        if not (1 <= s_x <= self.s_x_count and 1 <= s_y <= self.s_y_count):
            raise ValueError(f"grid index ({s_x}, {s_y}) out of range")
        return Position3D(self.x_min + (s_x - 1) * self.delta_x,
                          self.y_min + (s_y - 1) * self.delta_y, z)

    def points(self, z: float = 0.0) -> np.ndarray:
        """All grid points as an (n_points, 3) array in flat (y-major) order."""
        xs = self.x_min + np.arange(self.s_x_count) * self.delta_x
        ys = self.y_min + np.arange(self.s_y_count) * self.delta_y
        out = np.empty((self.n_points, 3))
        out[:, 0] = np.tile(xs, self.s_y_count)
        out[:, 1] = np.repeat(ys, self.s_x_count)
        out[:, 2] = z
        return out


@dataclass(frozen=True)
class SystemConfig:
    """Everything needed to realize channels and build codebooks for one system."""

    ris: ArrayGeometry
    bs: ArrayGeometry
    bs_position: Position3D
    g_scatter: Position3D
    grid: GridSpec
    user_region: Region
    scatter_region: Region | None = None  # None: reuse user_region
    user_height: float = 0.0
    n_bs_paths: int = 3
    n_user_paths: int = 3
    weak_path_variance: float = 0.001
    phase_mode: str = "physical"

    def __post_init__(self):
        if self.n_bs_paths < 1 or self.n_user_paths < 1:
            raise ValueError("path counts must be at least 1")
        if self.weak_path_variance < 0:
            raise ValueError("weak path variance must be nonnegative")
        if self.phase_mode not in PHASE_MODES:
            raise ValueError(f"phase_mode must be one of {PHASE_MODES}")

    @property
    def effective_scatter_region(self) -> Region:
        return self.scatter_region if self.scatter_region is not None else self.user_region

    def to_dict(self) -> dict[str, Any]:
        def geom(g: ArrayGeometry):
            return {"n_rows": g.n_rows, "n_cols": g.n_cols,
                    "spacing": g.spacing, "wavelength": g.wavelength}

        def pos(p: Position3D):
            return [p.x, p.y, p.z]

        def region(r: Region | None):
            return None if r is None else {"x": list(r.x), "y": list(r.y), "z": list(r.z)}

        return {
            "ris": geom(self.ris),
            "bs": geom(self.bs),
            "bs_position": pos(self.bs_position),
            "g_scatter": pos(self.g_scatter),
            "grid": {"s_x_count": self.grid.s_x_count, "s_y_count": self.grid.s_y_count,
                     "delta_x": self.grid.delta_x, "delta_y": self.grid.delta_y,
                     "x_min": self.grid.x_min, "y_min": self.grid.y_min},
            "user_region": region(self.user_region),
            "scatter_region": region(self.scatter_region),
            "user_height": self.user_height,
            "n_bs_paths": self.n_bs_paths,
            "n_user_paths": self.n_user_paths,
            "weak_path_variance": self.weak_path_variance,
            "phase_mode": self.phase_mode,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SystemConfig":
        def geom(g):
            return ArrayGeometry(int(g["n_rows"]), int(g["n_cols"]),
                                 float(g["spacing"]), float(g["wavelength"]))

        def region(r):
            if r is None:
                return None
            return Region(tuple(map(float, r["x"])), tuple(map(float, r["y"])),
                          tuple(map(float, r.get("z", (0.0, 0.0)))))

        g = d["grid"]
        return cls(
            ris=geom(d["ris"]),
            bs=geom(d["bs"]),
            bs_position=Position3D(*map(float, d["bs_position"])),
            g_scatter=Position3D(*map(float, d["g_scatter"])),
            grid=GridSpec(int(g["s_x_count"]), int(g["s_y_count"]),
                          float(g["delta_x"]), float(g["delta_y"]),
                          float(g["x_min"]), float(g["y_min"])),
            user_region=region(d["user_region"]),
            scatter_region=region(d.get("scatter_region")),
            user_height=float(d.get("user_height", 0.0)),
            n_bs_paths=int(d.get("n_bs_paths", 3)),
            n_user_paths=int(d.get("n_user_paths", 3)),
            weak_path_variance=float(d.get("weak_path_variance", 0.001)),
            phase_mode=str(d.get("phase_mode", "physical")),
        )


def desk_scale(**overrides) -> SystemConfig:
    """A small system that runs in seconds: 8x8 surface, 240-codeword grid.

    The grid sits inside the panel's radiating near field (Rayleigh distance
    ~0.49 m at 30 GHz), so position codewords genuinely discriminate range.
    """
    base = dict(
        ris=ArrayGeometry.half_wavelength(8, 8, 30e9),
        bs=ArrayGeometry.half_wavelength(8, 8, 30e9),
        bs_position=Position3D(20.0, 20.0, 0.0),
        g_scatter=Position3D(20.0, 20.0, 0.0),
        grid=GridSpec(s_x_count=20, s_y_count=12, delta_x=0.04, delta_y=0.03,
                      x_min=-0.38, y_min=0.10),
        user_region=Region(x=(-0.40, 0.40), y=(0.085, 0.445)),
    )
    base.update(overrides)
    return SystemConfig(**base)


def full_scale(**overrides) -> SystemConfig:
    """The 512-element / 6000-codeword configuration used for overhead accounting."""
    base = dict(
        ris=ArrayGeometry.half_wavelength(16, 32, 30e9),
        bs=ArrayGeometry.half_wavelength(16, 32, 30e9),
        bs_position=Position3D(20.0, 20.0, 0.0),
        g_scatter=Position3D(20.0, 20.0, 0.0),
        grid=GridSpec(s_x_count=100, s_y_count=60, delta_x=1.0, delta_y=1.0,
                      x_min=-49.5, y_min=-29.5),
        user_region=Region(x=(-50.0, 50.0), y=(-30.0, 30.0)),
    )
    base.update(overrides)
    return SystemConfig(**base)


PRESETS = {"desk": desk_scale, "full": full_scale}
