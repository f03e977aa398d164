"""Steering vectors, cascaded channel realizations and the pilot signal model.

All steering vectors are unit-modulus per entry with amplitude 1/sqrt(N).
The surface applies a phase-shift codeword ``w`` and a probe observes
``sum_t gain_t * (w^T steering_t) + noise`` with unit pilot power.

Phase conventions
-----------------
Two distance-phase constants are supported via ``phase_mode``:

* ``"physical"`` (default): 2*pi/lambda, the free-space wavenumber.
* ``"spacing_scaled"``: 2*pi*spacing/lambda, a convention found in parts of
  the literature; at half-wavelength pitch it shrinks distance phases by a
  factor of two relative to physical propagation.

With the e^{-j phase} sign used throughout, the planar-wave limit of a
near-field vector at direction cosines (dx, dy, dz) matches the far-field
vector at spatial frequencies u = -dz, v = -dx; see
:func:`direction_for_spatial_frequencies`.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .geometry import ArrayGeometry, Position3D, element_grid

PHASE_MODES = ("physical", "spacing_scaled")

# Steering vectors and codewords are plain complex ndarrays.
ComplexVector = np.ndarray


def phase_constant(geom: ArrayGeometry, phase_mode: str = "physical") -> float:
    """Distance-to-phase constant in rad/m for the chosen convention."""
    if phase_mode == "physical":
        return 2.0 * math.pi / geom.wavelength
    if phase_mode == "spacing_scaled":
        return 2.0 * math.pi * geom.spacing / geom.wavelength
    raise ValueError(f"phase_mode must be one of {PHASE_MODES}, got {phase_mode!r}")


def far_field_steering(u: float, v: float, geom: ArrayGeometry) -> ComplexVector:
    """Planar-wavefront steering vector at spatial frequencies (u, v).

    Entry (n1, n2) is e^{-j*2*pi*(d/lambda)*(u*n1 + v*n2)} / sqrt(N) in
    row-major order; at half-wavelength pitch the per-index phase step is
    pi*u (rows) and pi*v (columns).
    """
    if not (-1.0 <= u <= 1.0 and -1.0 <= v <= 1.0):
        raise ValueError(f"spatial frequencies must lie in [-1, 1], got ({u}, {v})")
    factor = 2.0 * math.pi * geom.spacing / geom.wavelength
    rows = np.repeat(np.arange(geom.n_rows), geom.n_cols)
    cols = np.tile(np.arange(geom.n_cols), geom.n_rows)
    phase = factor * (u * rows + v * cols)
    return np.exp(-1j * phase) / math.sqrt(geom.n_elements)


def direction_for_spatial_frequencies(u: float, v: float) -> np.ndarray:
    """Unit direction whose planar-wave phase profile matches (u, v).

    Requires u^2 + v^2 <= 1; the returned vector points into the y > 0
    half-space in front of the panel.
    """
    rest = 1.0 - u * u - v * v
    if rest < 0:
        raise ValueError(f"(u, v) outside the unit disk: ({u}, {v})")
    return np.array([-v, math.sqrt(rest), -u])


def spatial_frequencies_for_direction(direction: np.ndarray) -> tuple[float, float]:
    """Inverse of :func:`direction_for_spatial_frequencies` (direction need not be unit)."""
    d = np.asarray(direction, dtype=float)
    n = np.linalg.norm(d)
    if n == 0:
        return 0.0, 0.0
    d = d / n
    return float(-d[2]), float(-d[0])


def _target_array(target) -> np.ndarray:
    if isinstance(target, Position3D):
        return target.as_array()
    arr = np.asarray(target, dtype=float)
    if arr.shape[-1] != 3:
        raise ValueError(f"target must have 3 coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("target coordinates must be finite")
    return arr


def _distances(points: np.ndarray, geom: ArrayGeometry) -> np.ndarray:
    """Euclidean distance from every element to every point; (..., N)."""
    x_e, z_e = element_grid(geom)
    p = points[..., None, :]
    return np.sqrt((x_e - p[..., 0]) ** 2 + p[..., 1] ** 2 + (z_e - p[..., 2]) ** 2)


@functools.lru_cache(maxsize=128)
def _point_distances(geom: ArrayGeometry, point: tuple[float, float, float]) -> np.ndarray:
    # Fixed anchors (the strongest scatter in particular) recur for every
    # sample; caching their element distances dominates generation speed.
    return _distances(np.array(point), geom)


def _distances_for(target, geom: ArrayGeometry) -> np.ndarray:
    if isinstance(target, Position3D):
        return _point_distances(geom, (target.x, target.y, target.z))
    return _distances(_target_array(target), geom)


def near_field_steering(target, geom: ArrayGeometry,
                        phase_mode: str = "physical") -> ComplexVector:
    """Spherical-wavefront steering vector for a point at finite range.

    ``target`` may be a :class:`Position3D` or an (..., 3) array; the result
    has shape (..., N). Entry (n1, n2) is e^{-j*kappa*D} / sqrt(N) where D is
    the element-to-target distance and kappa follows ``phase_mode``.
    """
    kappa = phase_constant(geom, phase_mode)
    dist = _distances_for(target, geom)
    return np.exp(-1j * kappa * dist) / math.sqrt(geom.n_elements)


def effective_near_field_steering(user, scatter, geom: ArrayGeometry,
                                  phase_mode: str = "physical") -> ComplexVector:
    """Cascaded steering vector: phases carry the user/scatter distance difference.

    Entry (n1, n2) is e^{-j*kappa*(D_user - D_scatter)} / sqrt(N); a fixed
    scatter-side profile therefore folds into the same vector that the
    position codebook is built from.
    """
    kappa = phase_constant(geom, phase_mode)
    d_user = _distances_for(user, geom)
    d_scatter = _distances_for(scatter, geom)
    return np.exp(-1j * kappa * (d_user - d_scatter)) / math.sqrt(geom.n_elements)


@dataclass
class PathTerm:
    """One cascaded propagation path: complex gain and its steering vector."""

    gain: complex
    steering: ComplexVector


@dataclass
class ChannelRealization:
    """One drawn channel. ``terms[0]`` is the strongest (training target) path."""

    terms: list[PathTerm]
    user_position: Position3D
    true_optimal_flat_index: int | None = None

    def __post_init__(self):
        if not self.terms:
            raise ValueError("a channel realization needs at least one path term")

    @property
    def strongest(self) -> PathTerm:
        return self.terms[0]


@dataclass(frozen=True)
class NoiseModel:
    """Additive complex Gaussian observation noise with total variance sigma2."""

    sigma2: float
    rng_seed: int = 0

    def __post_init__(self):
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")

    @classmethod
    def from_snr_db(cls, snr_db: float | None, rng_seed: int = 0) -> "NoiseModel":
        """Transmit-SNR convention: sigma2 = 10^(-snr_db/10); None means noiseless."""
        if snr_db is None:
            return cls(0.0, rng_seed)
        return cls(10.0 ** (-float(snr_db) / 10.0), rng_seed)


def _crandn(rng: np.random.Generator, scale: float = 1.0) -> complex:
    re, im = rng.standard_normal(2)
    return scale / math.sqrt(2.0) * complex(re, im)


def _bs_steering_for_point(cfg: SystemConfig, point: Position3D) -> ComplexVector:
    """Base-station panel response toward a path anchor point.

    When the anchor coincides with the panel position (the direct-path
    default), the look direction falls back to the surface centre.
    """
    vec = point.as_array() - cfg.bs_position.as_array()
    if np.linalg.norm(vec) < 1e-9:
        vec = -cfg.bs_position.as_array()
    u, v = spatial_frequencies_for_direction(vec)
    return far_field_steering(u, v, cfg.bs)


@functools.lru_cache(maxsize=16)
def _strongest_bs_steering(cfg: SystemConfig) -> ComplexVector:
    return _bs_steering_for_point(cfg, cfg.g_scatter)


def combining_attenuation(cfg: SystemConfig, point: Position3D) -> float:
    """|a(path)^H a(strongest)| for the receive combiner locked to the strongest path."""
    return float(abs(np.vdot(_bs_steering_for_point(cfg, point),
                             _strongest_bs_steering(cfg))))


def sample_channel(cfg: SystemConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw one cascaded channel realization.

    The strongest pair couples the uniformly drawn user position with the
    fixed strongest scatter; standard-normal complex gains carry the
    sqrt(M*N^2 / (L_bs*L_user)) array factor. The remaining cross pairs use
    weak gains (variance ``weak_path_variance`` per side), scatter positions
    drawn from the scatter region, and the receive-combiner attenuation of
    their panel-side path.

    Draw order is pinned (user, strong gains, weak gains panel-side then
    user-side, scatter positions panel-side then user-side) so realizations
    are reproducible from the generator state alone.
    """
    user = cfg.user_region.sample(rng)
    user = Position3D(user.x, user.y, cfg.user_height)

    scale = math.sqrt(cfg.bs.n_elements * cfg.ris.n_elements**2
                      / (cfg.n_bs_paths * cfg.n_user_paths))
    weak_std = math.sqrt(cfg.weak_path_variance)

    alpha_bs = [_crandn(rng)]
    alpha_user = [_crandn(rng)]
    alpha_bs += [_crandn(rng, weak_std) for _ in range(cfg.n_bs_paths - 1)]
    alpha_user += [_crandn(rng, weak_std) for _ in range(cfg.n_user_paths - 1)]

    scatter_region = cfg.effective_scatter_region
    bs_points = [cfg.g_scatter]
    bs_points += [scatter_region.sample(rng) for _ in range(cfg.n_bs_paths - 1)]
    user_points = [user]
    user_points += [scatter_region.sample(rng) for _ in range(cfg.n_user_paths - 1)]

    terms = [PathTerm(
        gain=scale * alpha_bs[0] * alpha_user[0],
        steering=effective_near_field_steering(user, cfg.g_scatter, cfg.ris, cfg.phase_mode),
    )]
    for l1 in range(cfg.n_bs_paths):
        atten = 1.0 if l1 == 0 else combining_attenuation(cfg, bs_points[l1])
        for l2 in range(cfg.n_user_paths):
            if l1 == 0 and l2 == 0:
                continue
            terms.append(PathTerm(
                gain=scale * alpha_bs[l1] * alpha_user[l2] * atten,
                steering=effective_near_field_steering(user_points[l2], bs_points[l1],
                                                       cfg.ris, cfg.phase_mode),
            ))
    return ChannelRealization(terms, user)


def _noiseless_responses(codewords: np.ndarray, chan: ChannelRealization) -> np.ndarray:
    """(Q,) noiseless observations for a (Q, N) codeword block."""
    steerings = np.stack([t.steering for t in chan.terms], axis=1)  # (N, T)
    gains = np.array([t.gain for t in chan.terms])
    return (codewords @ steerings) @ gains


def received_signal(codeword: ComplexVector, chan: ChannelRealization,
                    noise: NoiseModel, rng: np.random.Generator | None = None) -> complex:
    """One probe slot: y = sum_t gain_t * (codeword^T steering_t) + n.

    Noiseless probes (sigma2 == 0) consume no generator draws.
    """
    codeword = np.asarray(codeword)
    n = chan.terms[0].steering.shape[0]
    if codeword.shape != (n,):
        raise ValueError(f"codeword length {codeword.shape} does not match N={n}")
    y = complex(_noiseless_responses(codeword[None, :], chan)[0])
    if noise.sigma2 > 0:
        if rng is None:
            raise ValueError("rng is required when sigma2 > 0")
        y += _crandn(rng, math.sqrt(noise.sigma2))
    return y


def receive_batch(codewords, chan: ChannelRealization, noise: NoiseModel,
                  rng: np.random.Generator | None = None) -> np.ndarray:
    """Probe a codeword sequence with independent noise per slot; (Q,) complex."""
    codewords = np.asarray(codewords)
    if codewords.size == 0:
        return np.zeros(0, dtype=complex)
    if codewords.ndim == 1:
        codewords = codewords[None, :]
    n = chan.terms[0].steering.shape[0]
    if codewords.shape[1] != n:
        raise ValueError(f"codeword length {codewords.shape[1]} does not match N={n}")
    y = _noiseless_responses(codewords, chan)
    if noise.sigma2 > 0:
        if rng is None:
            raise ValueError("rng is required when sigma2 > 0")
        draws = rng.standard_normal((codewords.shape[0], 2))
        y = y + math.sqrt(noise.sigma2 / 2.0) * (draws[:, 0] + 1j * draws[:, 1])
    return y
