import numpy as np
import pytest

from xlris.channel import effective_near_field_steering
from xlris.codebook import (build_far_field_codebook, build_near_field_codebook,
                            flat_index, index_pair, load_codebook, save_codebook,
                            subsample)
from xlris.config import GridSpec, desk_scale, full_scale
from xlris.geometry import ArrayGeometry, Position3D

GEOM = ArrayGeometry.half_wavelength(8, 8, 30e9)
SCATTER = Position3D(20.0, 20.0, 0.0)


# --- far-field codebook --------------------------------------------------------

def test_far_field_grid_two_rows():
    cb = build_far_field_codebook(ArrayGeometry.half_wavelength(2, 2, 30e9))
    assert sorted(set(cb.grid[:, 0])) == [-0.5, 0.5]
    assert sorted(set(cb.grid[:, 1])) == [-0.5, 0.5]


def test_far_field_single_element():
    cb = build_far_field_codebook(ArrayGeometry.half_wavelength(1, 1, 30e9))
    assert len(cb) == 1
    assert cb.codewords[0, 0] == pytest.approx(1.0)


def test_far_field_full_scale_count():
    cb = build_far_field_codebook(full_scale().ris)
    assert len(cb) == 512


def test_far_field_grid_symmetry():
    even = build_far_field_codebook(ArrayGeometry.half_wavelength(4, 4, 30e9))
    u = np.unique(even.grid[:, 0])
    assert np.allclose(u, -u[::-1])
    odd = build_far_field_codebook(ArrayGeometry.half_wavelength(3, 3, 30e9))
    assert 0.0 in np.unique(odd.grid[:, 0])


def test_far_field_ordering_u_major():
    cb = build_far_field_codebook(ArrayGeometry.half_wavelength(2, 3, 30e9))
    # u constant over each block of n_cols consecutive codewords
    assert np.allclose(cb.grid[:3, 0], cb.grid[0, 0])
    assert np.allclose(cb.grid[3:, 0], cb.grid[3, 0])
    assert not np.allclose(cb.grid[0, 0], cb.grid[3, 0])


# --- near-field codebook --------------------------------------------------------

def test_near_field_full_scale_count():
    cfg = full_scale()
    cb = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter)
    assert len(cb) == 6000
    assert cb.codewords.shape == (6000, 512)


def test_near_field_single_point():
    grid = GridSpec(1, 1, 0.1, 0.1, 0.0, 0.3)
    cb = build_near_field_codebook(grid, GEOM, SCATTER)
    expect = np.conj(effective_near_field_steering(Position3D(0.0, 0.3, 0.0), SCATTER, GEOM))
    assert np.allclose(cb.codewords[0], expect, atol=1e-15)


def test_near_field_first_point_is_grid_minimum():
    cfg = desk_scale()
    cb = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter)
    p = cb.point_for(1)
    assert (p.x, p.y) == (cfg.grid.x_min, cfg.grid.y_min)


def test_near_field_flat_order_is_y_major():
    cfg = desk_scale()
    cb = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter)
    s = flat_index(3, 2, cb.s_x_count)
    p = cb.point_for(s)
    assert p.x == pytest.approx(cfg.grid.x_min + 2 * cfg.grid.delta_x)
    assert p.y == pytest.approx(cfg.grid.y_min + 1 * cfg.grid.delta_y)


def test_codeword_modulus_invariant():
    cfg = desk_scale()
    near = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter)
    far = build_far_field_codebook(cfg.ris)
    n = cfg.ris.n_elements
    assert np.max(np.abs(np.abs(near.codewords) - 1 / np.sqrt(n))) < 1e-12
    assert np.max(np.abs(np.abs(far.codewords) - 1 / np.sqrt(n))) < 1e-12


# --- flat/pair indexing ----------------------------------------------------------

def test_flat_index_examples():
    assert flat_index(1, 1, 100) == 1
    assert flat_index(100, 60, 100) == 6000
    assert index_pair(1, 100) == (1, 1)
    assert index_pair(6000, 100) == (100, 60)


def test_flat_pair_bijection_exhaustive():
    s_x, s_y = 20, 12
    seen = set()
    for s in range(1, s_x * s_y + 1):
        sx, sy = index_pair(s, s_x, s_x * s_y)
        assert flat_index(sx, sy, s_x, s_y) == s
        seen.add((sx, sy))
    assert len(seen) == s_x * s_y


def test_index_domain_errors():
    with pytest.raises(ValueError):
        flat_index(0, 1, 10)
    with pytest.raises(ValueError):
        flat_index(11, 1, 10)
    with pytest.raises(ValueError):
        flat_index(1, 13, 10, 12)
    with pytest.raises(ValueError):
        index_pair(0, 10)
    with pytest.raises(ValueError):
        index_pair(121, 10, 120)


# --- probe subsampling ------------------------------------------------------------

def test_subsample_full_scale():
    probe = subsample(6000, 20)
    assert len(probe) == 300
    assert probe.flat_indices[0] == 20
    assert probe.flat_indices[-1] == 6000


def test_subsample_all_and_floor():
    assert np.array_equal(subsample(5, 1).flat_indices, [1, 2, 3, 4, 5])
    assert np.array_equal(subsample(10, 3).flat_indices, [3, 6, 9])


def test_subsample_interval_too_large_warns():
    with pytest.warns(UserWarning):
        probe = subsample(10, 11)
    assert len(probe) == 0


def test_subsample_properties():
    rng = np.random.default_rng(4)
    for _ in range(50):
        total = int(rng.integers(1, 500))
        interval = int(rng.integers(1, min(40, total) + 1))
        probe = subsample(total, interval)
        assert len(probe) == total // interval
        assert np.all(probe.flat_indices % interval == 0)
        assert np.all(probe.flat_indices <= total)


def test_subsample_invalid_interval():
    with pytest.raises(ValueError):
        subsample(10, 0)


# --- caching ------------------------------------------------------------------------

def test_near_codebook_roundtrip(tmp_path):
    cfg = desk_scale()
    cb = build_near_field_codebook(cfg.grid, cfg.ris, cfg.g_scatter)
    save_codebook(cb, tmp_path / "near")
    back = load_codebook(tmp_path / "near")
    assert np.array_equal(back.codewords, cb.codewords)
    assert (back.s_x_count, back.s_y_count) == (cb.s_x_count, cb.s_y_count)
    assert back.g_scatter == cb.g_scatter
    n = cfg.ris.n_elements
    assert np.max(np.abs(np.abs(back.codewords) - 1 / np.sqrt(n))) < 1e-12


def test_far_codebook_roundtrip(tmp_path):
    cb = build_far_field_codebook(GEOM)
    save_codebook(cb, tmp_path / "far")
    back = load_codebook(tmp_path / "far")
    assert np.array_equal(back.codewords, cb.codewords)
    assert np.array_equal(back.grid, cb.grid)
