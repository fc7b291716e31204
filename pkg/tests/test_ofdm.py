import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jspofdm.channel import apply_channel, channel_freq_response
from jspofdm.grid import build_grid
from jspofdm.ofdm import (OfdmParams, carrier_bins, ofdm_demodulate, ofdm_modulate,
                          qpsk_demodulate, qpsk_modulate)

S = 1 / np.sqrt(2)


def test_gray_constellation():
    pts = qpsk_modulate([0, 0, 0, 1, 1, 1, 1, 0])
    np.testing.assert_allclose(pts, [S + S * 1j, S - S * 1j, -S - S * 1j, -S + S * 1j])
    assert np.allclose(np.abs(pts), 1.0)
    # Gray: neighbouring points differ in one bit
    bits = qpsk_demodulate(pts).reshape(4, 2)
    assert all(np.sum(bits[i] != bits[(i + 1) % 4]) == 1 for i in range(4))


def test_qpsk_round_trip_and_scale(rng):
    bits = rng.integers(0, 2, 10_000)
    s = qpsk_modulate(bits)
    np.testing.assert_array_equal(qpsk_demodulate(s), bits)
    np.testing.assert_array_equal(qpsk_demodulate(0.1 * s), bits)


def test_qpsk_odd_bits():
    with pytest.raises(ValueError):
        qpsk_modulate([0, 1, 1])


def test_params_validation():
    for kw in (dict(fft_size=500), dict(guard="xx"), dict(guard_len=512), dict(oversample=0)):
        with pytest.raises(ValueError):
            OfdmParams(**kw)
    p = OfdmParams()
    assert p.symbol_len == 548 and p.sample_rate_hz == pytest.approx(7.68e6)


def test_zero_signal(grid_small):
    p = OfdmParams(64, "zp", 16)
    assert not ofdm_modulate(np.zeros(grid_small.M), grid_small, p).any()
    assert not ofdm_demodulate(np.zeros(80), grid_small, p).any()


def test_single_carrier_is_complex_exponential():
    g = build_grid(1, 0, "double", [(1, 1)])
    p = OfdmParams(64, "zp", 0)
    x = ofdm_modulate(np.ones(1), g, p)
    n = np.arange(64)
    # unitary transform: constant magnitude 1/sqrt(fft_size)
    np.testing.assert_allclose(x, np.exp(2j * np.pi * n / 64) / 8, atol=1e-15)


def test_guards(grid_small, rng):
    s = rng.standard_normal(grid_small.M) + 0j
    zp = ofdm_modulate(s, grid_small, OfdmParams(64, "zp", 16))
    cp = ofdm_modulate(s, grid_small, OfdmParams(64, "cp", 16))
    assert not zp[64:].any()
    np.testing.assert_allclose(cp[:16], cp[64:])
    np.testing.assert_allclose(cp[16:], zp[:64])


def test_carrier_out_of_range(grid300):
    with pytest.raises(ValueError):
        carrier_bins(grid300, OfdmParams(256, "zp", 16))


def test_length_mismatch(grid_small):
    with pytest.raises(ValueError):
        ofdm_demodulate(np.zeros(64), grid_small, OfdmParams(64, "zp", 16))
    with pytest.raises(ValueError):
        ofdm_modulate(np.zeros(3), grid_small, OfdmParams(64, "zp", 16))


@settings(max_examples=40, deadline=None)
@given(guard=st.sampled_from(["zp", "cp"]), G=st.integers(0, 63), seed=st.integers(0, 2 ** 32 - 1))
def test_round_trip(guard, G, seed):
    g = build_grid(52, 2, "double", [(-27, -1), (1, 27)])
    p = OfdmParams(64, guard, G)
    r = np.random.default_rng(seed)
    s = r.standard_normal((3, g.M)) + 1j * r.standard_normal((3, g.M))
    np.testing.assert_allclose(ofdm_demodulate(ofdm_modulate(s, g, p), g, p), s, atol=1e-12)


@pytest.mark.parametrize("guard", ["zp", "cp"])
def test_channel_becomes_per_bin_gain(grid_small, rng, guard):
    # convolution theorem: a channel within the guard acts as diag(H)
    p = OfdmParams(64, guard, 16)
    taps = np.array([0.9 - 0.2j, 0.3 + 0.4j])
    s = rng.standard_normal(grid_small.M) + 1j * rng.standard_normal(grid_small.M)
    y = apply_channel(ofdm_modulate(s, grid_small, p), taps)
    H = channel_freq_response(taps, grid_small, p)
    np.testing.assert_allclose(ofdm_demodulate(y, grid_small, p), H * s, atol=1e-10)
