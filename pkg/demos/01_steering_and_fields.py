"""Spherical wavefronts and the near/far-field boundary
=======================================================

A quick tour of the two steering-vector families: where the planar-wave
approximation holds, where it breaks, and what "focusing" means for a
position codeword inside the radiating near field.

Run from the repository root:  python demos/01_steering_and_fields.py
Figures land in demos/output/.
"""

import numpy as np

from xlris import (ArrayGeometry, Position3D, aperture, far_field_steering,
                   near_field_steering, rayleigh_distance)
from xlris.channel import direction_for_spatial_frequencies

# An 8x8 panel at 30 GHz with half-wavelength pitch. Small by deployment
# standards, which keeps its near field conveniently desk-sized.
geom = ArrayGeometry.half_wavelength(8, 8, 30e9)
z_boundary = rayleigh_distance(aperture(geom), geom.wavelength)
print(f"panel: {geom.n_rows}x{geom.n_cols}, wavelength {geom.wavelength*1e3:.2f} mm")
print(f"aperture {aperture(geom)*100:.1f} cm -> Rayleigh distance {z_boundary:.2f} m")

# Every steering vector is unit-modulus per element: only phases differ.
vec = near_field_steering(Position3D(0.1, 0.25, 0.0), geom)
print(f"per-element amplitude: {np.abs(vec[0]):.4f} (= 1/sqrt(64))")

# How fast does a spherical wavefront converge to a plane wave? Track the
# overlap between the near-field vector and the far-field vector for the
# same direction while the target recedes.
u, v = 0.3, -0.2
direction = direction_for_spatial_frequencies(u, v)
far = far_field_steering(u, v, geom)
print("\n range/Rayleigh   |<near, far>|")
ranges = z_boundary * np.array([0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 10.0])
overlaps = []
for r in ranges:
    near = near_field_steering(r * direction, geom)
    overlap = abs(np.sum(np.conj(near) * far))
    overlaps.append(overlap)
    print(f"      {r / z_boundary:5.2f}        {overlap:.4f}")

# Inside the boundary the overlap collapses: a far-field beam cannot focus
# on a nearby point, which is exactly why the position codebook exists.

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping figures")
    raise SystemExit(0)

from pathlib import Path

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

fig, axes = plt.subplots(1, 2, figsize=(10, 4))

axes[0].semilogx(ranges / z_boundary, overlaps, "o-")
axes[0].axvline(1.0, color="grey", ls="--", label="Rayleigh distance")
axes[0].set_xlabel("range / Rayleigh distance")
axes[0].set_ylabel("|<near, far>|")
axes[0].set_title("planar-wave limit")
axes[0].legend()

# Beam-gain map of a single near-field codeword focused at (0.1, 0.25):
# sweep a probe point over the x-y plane and plot |codeword . steering|.
focus = Position3D(0.1, 0.25, 0.0)
codeword = np.conj(near_field_steering(focus, geom))
xs = np.linspace(-0.4, 0.4, 161)
ys = np.linspace(0.05, 0.45, 81)
gx, gy = np.meshgrid(xs, ys, indexing="xy")
pts = np.stack([gx, gy, np.zeros_like(gx)], axis=-1)
gain = np.abs(near_field_steering(pts.reshape(-1, 3), geom) @ codeword).reshape(81, 161)

im = axes[1].imshow(gain, origin="lower", extent=[xs[0], xs[-1], ys[0], ys[-1]],
                    aspect="auto", cmap="viridis")
axes[1].plot(focus.x, focus.y, "r+", markersize=12, label="focus point")
axes[1].set_xlabel("x [m]")
axes[1].set_ylabel("y [m]")
axes[1].set_title("near-field codeword focuses in range AND angle")
axes[1].legend()
fig.colorbar(im, ax=axes[1], label="|w . c(p)|")

fig.tight_layout()
fig.savefig(out / "01_steering_and_fields.png", dpi=130)
print(f"\nwrote {out / '01_steering_and_fields.png'}")
