"""Independent brute-force reference implementations for cross-checking.

Pure Python over math/cmath only, with scalar loops and none of the library's
vectorized code paths, so that a bug in one side cannot hide in the other.
Ties in the argmax keep the smallest index (strict improvement required).
"""

from __future__ import annotations

import cmath
import math


def element_coords(n_rows: int, n_cols: int, spacing: float) -> list[tuple[float, float, float]]:
    coords = []
    for r in range(n_rows):
        for c in range(n_cols):
            z = (r - (n_rows - 1) / 2.0) * spacing
            x = (c - (n_cols - 1) / 2.0) * spacing
            coords.append((x, 0.0, z))
    return coords


def effective_steering(coords, user, scatter, kappa: float) -> list[complex]:
    amp = 1.0 / math.sqrt(len(coords))
    out = []
    for (xe, _ye, ze) in coords:
        d_user = math.sqrt((xe - user[0]) ** 2 + user[1] ** 2 + (ze - user[2]) ** 2)
        d_sc = math.sqrt((xe - scatter[0]) ** 2 + scatter[1] ** 2 + (ze - scatter[2]) ** 2)
        out.append(amp * cmath.exp(-1j * kappa * (d_user - d_sc)))
    return out


def build_grid_codewords(n_rows, n_cols, spacing, wavelength, scatter,
                         s_x_count, s_y_count, delta_x, delta_y,
                         x_min, y_min, height) -> list[list[complex]]:
    """All conjugated grid steering vectors in flat y-major order."""
    coords = element_coords(n_rows, n_cols, spacing)
    kappa = 2.0 * math.pi / wavelength
    codewords = []
    for sy in range(1, s_y_count + 1):
        for sx in range(1, s_x_count + 1):
            point = (x_min + (sx - 1) * delta_x, y_min + (sy - 1) * delta_y, height)
            codewords.append([z.conjugate()
                              for z in effective_steering(coords, point, scatter, kappa)])
    return codewords


def best_codeword_index(codewords, n_rows, n_cols, spacing, wavelength,
                        scatter, user) -> int:
    """1-based argmax of |codeword . steering(user)| by exhaustive scalar loops."""
    coords = element_coords(n_rows, n_cols, spacing)
    kappa = 2.0 * math.pi / wavelength
    steer = effective_steering(coords, user, scatter, kappa)
    best_s, best_mag = 0, -1.0
    for s, cw in enumerate(codewords, start=1):
        acc = 0.0 + 0.0j
        for w, c in zip(cw, steer):
            acc += w * c
        if abs(acc) > best_mag:
            best_mag, best_s = abs(acc), s
    return best_s
