"""Shaping complex probe vectors into image-like tensors.

The networks consume a 2-channel H x W tensor per sample: channel 0 holds
real parts, channel 1 imaginary parts, filled row-major. H and W come from a
divisor search that keeps the grid close to square; lengths without a usable
divisor pair are zero-padded up to the next length that has one.

``preprocess`` is a pure reshape (bijective on the unpadded entries);
``canonicalize`` is a separate, optional scale/phase normalization that the
training pipeline can apply before it.
"""

from __future__ import annotations

import math

import numpy as np


def grid_shape(q: int) -> tuple[int, int, int]:
    """(padded_length, height, width) for a length-q vector.

    Height is the largest divisor of the padded length not exceeding its
    square root; the padded length is the smallest q' >= q whose resulting
    aspect ratio w/h stays within 4.
    """
    if q < 1:
        raise ValueError("vector length must be positive")
    for padded in range(q, 5 * q):
        h = max(d for d in range(1, math.isqrt(padded) + 1) if padded % d == 0)
        w = padded // h
        if w <= 4 * h:
            return padded, h, w
    raise AssertionError("unreachable: every power of two within 4x has ratio <= 2")


def preprocess(features: np.ndarray) -> np.ndarray:
    """Complex (..., q) -> real (..., 2, h, w) float32, zero-padded row-major."""
    features = np.asarray(features)
    q = features.shape[-1]
    padded, h, w = grid_shape(q)
    lead = features.shape[:-1]
    flat = np.zeros(lead + (padded,), dtype=np.complex64)
    flat[..., :q] = features
    out = np.empty(lead + (2, h, w), dtype=np.float32)
    out[..., 0, :, :] = flat.real.reshape(lead + (h, w))
    out[..., 1, :, :] = flat.imag.reshape(lead + (h, w))
    return out


def unpreprocess(tensor: np.ndarray, q: int) -> np.ndarray:
    """Inverse of :func:`preprocess`: recover the length-q complex vector."""
    tensor = np.asarray(tensor)
    h, w = tensor.shape[-2:]
    flat = (tensor[..., 0, :, :] + 1j * tensor[..., 1, :, :]).reshape(
        tensor.shape[:-3] + (h * w,))
    return flat[..., :q].astype(np.complex64)


def canonicalize(features: np.ndarray) -> np.ndarray:
    """Scale- and phase-gauge normalization, per sample.

    Beam selection is invariant to a complex scalar on the whole observation
    vector, so divide by the strongest entry: it becomes 1+0j and the rest
    carry only relative information. Zero vectors pass through unchanged.
    """
    features = np.asarray(features, dtype=np.complex64)
    single = features.ndim == 1
    mat = features[None, :] if single else features
    idx = np.argmax(np.abs(mat), axis=-1)
    anchor = mat[np.arange(mat.shape[0]), idx]
    safe = np.where(np.isfinite(anchor) & (anchor != 0), anchor, 1.0)
    out = (mat / safe[:, None]).astype(np.complex64)
    return out[0] if single else out
