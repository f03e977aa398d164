import math

import numpy as np
import pytest

from xlris.channel import (NoiseModel, direction_for_spatial_frequencies,
                           effective_near_field_steering, far_field_steering,
                           near_field_steering, phase_constant, receive_batch,
                           received_signal, sample_channel)
from xlris.config import Region, desk_scale
from xlris.geometry import ArrayGeometry, Position3D, aperture, rayleigh_distance
from xlris.rng import STREAM_SAMPLE, derive_rng

GEOM = ArrayGeometry.half_wavelength(8, 8, 30e9)
SCATTER = Position3D(20.0, 20.0, 0.0)


# --- far-field steering -------------------------------------------------------

def test_broadside_is_constant():
    b = far_field_steering(0.0, 0.0, GEOM)
    assert np.allclose(b, 1 / 8, atol=1e-15)


def test_endfire_phase_on_two_elements():
    geom = ArrayGeometry.half_wavelength(1, 2, 30e9)
    b = far_field_steering(0.0, 1.0, geom)
    assert np.allclose(b * math.sqrt(2), [1.0, -1.0], atol=1e-12)


def test_far_field_self_inner_product_is_one():
    rng = np.random.default_rng(0)
    for _ in range(20):
        u, v = rng.uniform(-1, 1, 2)
        b = far_field_steering(u, v, GEOM)
        assert abs(np.vdot(b, b)) == pytest.approx(1.0, abs=1e-12)


def test_far_field_domain_errors():
    with pytest.raises(ValueError):
        far_field_steering(1.5, 0.0, GEOM)
    with pytest.raises(ValueError):
        far_field_steering(0.0, -1.01, GEOM)


# --- near-field steering ------------------------------------------------------

def test_single_element_phase():
    geom = ArrayGeometry.half_wavelength(1, 1, 30e9)
    target = Position3D(0.0, 0.3, 0.0)
    for mode in ("physical", "spacing_scaled"):
        vec = near_field_steering(target, geom, mode)
        kappa = phase_constant(geom, mode)
        assert vec[0] == pytest.approx(np.exp(-1j * kappa * 0.3), abs=1e-12)


def test_unit_modulus_for_random_targets():
    rng = np.random.default_rng(1)
    for _ in range(50):
        p = Position3D(*rng.uniform(-5, 5, 2), rng.uniform(0, 3))
        vec = near_field_steering(p, GEOM)
        assert np.max(np.abs(np.abs(vec) - 1 / 8)) < 1e-12


def test_target_on_element_allowed():
    # distance zero contributes phase zero
    geom = ArrayGeometry.half_wavelength(1, 1, 30e9)
    vec = near_field_steering(Position3D(0.0, 0.0, 0.0), geom)
    assert vec[0] == pytest.approx(1.0)


def test_nonfinite_target_rejected():
    with pytest.raises(ValueError):
        near_field_steering(np.array([0.0, np.inf, 0.0]), GEOM)


def test_far_field_limit_at_ten_rayleigh():
    z10 = 10 * rayleigh_distance(aperture(GEOM), GEOM.wavelength)
    rng = np.random.default_rng(2)
    for _ in range(50):
        while True:
            u, v = rng.uniform(-1, 1, 2)
            if u * u + v * v < 1.0:
                break
        target = z10 * direction_for_spatial_frequencies(u, v)
        near = near_field_steering(target, GEOM)
        far = far_field_steering(u, v, GEOM)
        assert abs(np.sum(np.conj(near) * far)) >= 0.95


# --- effective steering -------------------------------------------------------

def test_remote_scatter_reduces_to_plain_steering():
    # a scatter far enough that its element distances are nearly constant
    # contributes only a global phase
    user = Position3D(0.1, 0.3, 0.0)
    remote = Position3D(0.0, 1e6, 0.0)
    eff = effective_near_field_steering(user, remote, GEOM)
    plain = near_field_steering(user, GEOM)
    ratio = eff / plain
    assert np.max(np.abs(ratio - ratio[0])) < 1e-5


def test_user_at_scatter_gives_constant_vector():
    vec = effective_near_field_steering(SCATTER, SCATTER, GEOM)
    assert np.allclose(vec, 1 / 8, atol=1e-15)


def test_conjugate_alignment_is_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = Position3D(*rng.uniform(-0.4, 0.4, 2), 0.0)
        c = effective_near_field_steering(p, SCATTER, GEOM)
        assert abs(np.dot(np.conj(c), c)) == pytest.approx(1.0, abs=1e-12)


def test_spacing_scaled_mode_changes_phase_rate():
    user = Position3D(0.1, 0.3, 0.0)
    a = effective_near_field_steering(user, SCATTER, GEOM, "physical")
    b = effective_near_field_steering(user, SCATTER, GEOM, "spacing_scaled")
    assert phase_constant(GEOM, "spacing_scaled") == pytest.approx(
        phase_constant(GEOM, "physical") * GEOM.spacing)
    assert not np.allclose(a, b)
    with pytest.raises(ValueError):
        phase_constant(GEOM, "literal")


# --- channel sampling ---------------------------------------------------------

def test_single_path_config_gives_one_term():
    cfg = desk_scale(n_bs_paths=1, n_user_paths=1)
    chan = sample_channel(cfg, derive_rng(0, STREAM_SAMPLE, 0))
    assert len(chan.terms) == 1


def test_path_count_and_determinism():
    cfg = desk_scale()
    a = sample_channel(cfg, derive_rng(5, STREAM_SAMPLE, 9))
    b = sample_channel(cfg, derive_rng(5, STREAM_SAMPLE, 9))
    assert len(a.terms) == cfg.n_bs_paths * cfg.n_user_paths
    assert a.user_position == b.user_position
    for ta, tb in zip(a.terms, b.terms):
        assert ta.gain == tb.gain
        assert np.array_equal(ta.steering, tb.steering)


def test_strong_gain_scale():
    cfg = desk_scale(n_bs_paths=1, n_user_paths=1)
    chan = sample_channel(cfg, derive_rng(1, STREAM_SAMPLE, 0))
    # replay the pinned draw order: 3 position uniforms, then two complex gains;
    # the gain folds in sqrt(M * N^2 / (L_bs * L_user)) = sqrt(64 * 64^2)
    rng = derive_rng(1, STREAM_SAMPLE, 0)
    for _ in range(3):
        rng.uniform(0.0, 1.0)
    re1, im1 = rng.standard_normal(2)
    re2, im2 = rng.standard_normal(2)
    expect = math.sqrt(64 * 64**2) / 2.0 * complex(re1, im1) * complex(re2, im2)
    assert chan.terms[0].gain == pytest.approx(expect, rel=1e-12)


def test_user_height_pinned():
    cfg = desk_scale(user_height=0.7)
    chan = sample_channel(cfg, derive_rng(2, STREAM_SAMPLE, 0))
    assert chan.user_position.z == 0.7


def test_empty_region_rejected():
    with pytest.raises(ValueError):
        Region(x=(1.0, 0.0), y=(0.0, 1.0))


def test_interference_ratio_matches_analytic_variance():
    # Scalar panels keep the combining attenuation at exactly 1, so the
    # expected weak-to-strong power ratio is 2v + 2v + 4v^2 with v the
    # per-side weak variance. Monte-Carlo over a fixed stream.
    one = ArrayGeometry.half_wavelength(1, 1, 30e9)
    cfg = desk_scale(ris=one, bs=one)
    v = cfg.weak_path_variance
    analytic = 4 * v + 4 * v * v
    strong = weak = 0.0
    n = 20_000
    for i in range(n):
        chan = sample_channel(cfg, derive_rng(11, STREAM_SAMPLE, i))
        strong += abs(chan.terms[0].gain) ** 2
        weak += sum(abs(t.gain) ** 2 for t in chan.terms[1:])
    assert weak / strong == pytest.approx(analytic, rel=0.05)


# --- received signals ---------------------------------------------------------

def _single_path_channel(user=Position3D(0.1, 0.3, 0.0), gain=1.0 + 0j):
    from xlris.channel import ChannelRealization, PathTerm
    steering = effective_near_field_steering(user, SCATTER, GEOM)
    return ChannelRealization([PathTerm(gain, steering)], user)


def test_aligned_codeword_returns_gain():
    chan = _single_path_channel(gain=0.7 - 0.2j)
    y = received_signal(np.conj(chan.terms[0].steering), chan, NoiseModel(0.0))
    assert y == pytest.approx(0.7 - 0.2j, abs=1e-12)


def test_orthogonal_codeword_returns_zero():
    geom = ArrayGeometry.half_wavelength(1, 2, 30e9)
    from xlris.channel import ChannelRealization, PathTerm
    steering = near_field_steering(Position3D(0.05, 0.2, 0.0), geom)
    chan = ChannelRealization([PathTerm(1.0, steering)], Position3D(0.05, 0.2, 0.0))
    orth = np.array([steering[1], -steering[0]])  # codeword^T steering == 0
    assert abs(received_signal(orth, chan, NoiseModel(0.0))) < 1e-12


def test_codeword_length_mismatch_rejected():
    chan = _single_path_channel()
    with pytest.raises(ValueError):
        received_signal(np.ones(5), chan, NoiseModel(0.0))


def test_noise_mean_matches_noiseless_value():
    chan = _single_path_channel()
    cw = np.conj(chan.terms[0].steering)
    noiseless = received_signal(cw, chan, NoiseModel(0.0))
    sigma2 = 4.0
    rng = derive_rng(7, STREAM_SAMPLE, 0)
    draws = [received_signal(cw, chan, NoiseModel(sigma2), rng) for _ in range(10_000)]
    assert abs(np.mean(draws) - noiseless) <= 3 * math.sqrt(sigma2) / math.sqrt(10_000)


def test_receive_batch_empty():
    chan = _single_path_channel()
    y = receive_batch([], chan, NoiseModel(0.0))
    assert y.shape == (0,)


def test_receive_batch_matches_composition():
    chan = _single_path_channel()
    cws = np.stack([np.conj(chan.terms[0].steering),
                    far_field_steering(0.0, 0.0, GEOM),
                    far_field_steering(0.25, -0.5, GEOM)])
    batch = receive_batch(cws, chan, NoiseModel(0.0))
    singles = [received_signal(cw, chan, NoiseModel(0.0)) for cw in cws]
    assert np.allclose(batch, singles, atol=1e-12)
    # identical noise stream consumption: batch equals singles drawn in order
    noisy_batch = receive_batch(cws, chan, NoiseModel(0.5), derive_rng(3, 1, 0))
    rng = derive_rng(3, 1, 0)
    noisy_singles = [received_signal(cw, chan, NoiseModel(0.5), rng) for cw in cws]
    assert np.allclose(noisy_batch, noisy_singles, atol=1e-12)


def test_receive_batch_deterministic():
    chan = _single_path_channel()
    cws = np.stack([far_field_steering(0.0, 0.0, GEOM)] * 4)
    a = receive_batch(cws, chan, NoiseModel(1.0), derive_rng(9, 1, 1))
    b = receive_batch(cws, chan, NoiseModel(1.0), derive_rng(9, 1, 1))
    assert np.array_equal(a, b)


def test_rng_required_when_noisy():
    chan = _single_path_channel()
    with pytest.raises(ValueError):
        received_signal(np.conj(chan.terms[0].steering), chan, NoiseModel(1.0))


def test_global_phase_invariance():
    chan = _single_path_channel()
    cw = far_field_steering(0.25, 0.25, GEOM)
    base = abs(received_signal(cw, chan, NoiseModel(0.0)))
    for theta in (0.3, 1.7, -2.2):
        rotated = abs(received_signal(cw * np.exp(1j * theta), chan, NoiseModel(0.0)))
        assert rotated == pytest.approx(base, abs=1e-12)


def test_snr_conversion():
    assert NoiseModel.from_snr_db(0.0).sigma2 == pytest.approx(1.0)
    assert NoiseModel.from_snr_db(10.0).sigma2 == pytest.approx(0.1)
    assert NoiseModel.from_snr_db(None).sigma2 == 0.0
    with pytest.raises(ValueError):
        NoiseModel(-1.0)
