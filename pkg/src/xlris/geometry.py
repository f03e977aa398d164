"""Planar array geometry and the near/far-field boundary.

Both the reflecting surface and the base-station panel are uniform planar
arrays in the x-z plane with the panel centre at the origin of their local
frame. Rows (index ``n1``) step along the z-axis and columns (index ``n2``)
along the x-axis; the flat element order is row-major (``n1`` outer).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class Position3D:
    """A point in metres. All coordinates must be finite."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise ValueError(f"non-finite position ({self.x}, {self.y}, {self.z})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class ArrayGeometry:
    """A uniform planar array: ``n_rows * n_cols`` elements on a regular grid.

    ``spacing`` and ``wavelength`` are in metres; the default deployment uses
    half-wavelength pitch.
    """

    n_rows: int
    n_cols: int
    spacing: float
    wavelength: float

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"panel needs at least one element per axis, got {self.n_rows}x{self.n_cols}")
        if self.spacing <= 0 or self.wavelength <= 0:
            raise ValueError("spacing and wavelength must be positive")

    @classmethod
    def half_wavelength(cls, n_rows: int, n_cols: int, frequency_hz: float) -> "ArrayGeometry":
        wavelength = SPEED_OF_LIGHT / frequency_hz
        return cls(n_rows, n_cols, wavelength / 2.0, wavelength)

    @property
    def n_elements(self) -> int:
        return self.n_rows * self.n_cols


@functools.lru_cache(maxsize=32)
def element_grid(geom: ArrayGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Flat (x, z) element coordinates in row-major order, centred on the origin.

    This is the array-friendly form of :func:`element_positions`; the y
    coordinate of every element is 0. Cached per geometry; treat the returned
    arrays as read-only.
    """
    z_rows = (np.arange(geom.n_rows) - (geom.n_rows - 1) / 2.0) * geom.spacing
    x_cols = (np.arange(geom.n_cols) - (geom.n_cols - 1) / 2.0) * geom.spacing
    return np.tile(x_cols, geom.n_rows), np.repeat(z_rows, geom.n_cols)


def element_positions(geom: ArrayGeometry) -> list[Position3D]:
    """All element positions, row-major, mean exactly at the origin."""
    x, z = element_grid(geom)
    return [Position3D(float(xi), 0.0, float(zi)) for xi, zi in zip(x, z)]


def aperture(geom: ArrayGeometry) -> float:
    """Diagonal extent of the panel (the worst-case phase-curvature baseline)."""
    return math.hypot((geom.n_rows - 1) * geom.spacing, (geom.n_cols - 1) * geom.spacing)


def rayleigh_distance(aperture_m: float, wavelength: float) -> float:
    """Boundary between the radiating near field and the far field, 2*D^2/lambda."""
    if aperture_m < 0:
        raise ValueError("aperture must be nonnegative")
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    return 2.0 * aperture_m**2 / wavelength
