import warnings

import numpy as np
import pytest

from jspofdm.channel import (EPA_DELAYS_NS, ChannelDelayWarning, ChannelModel, apply_channel,
                             channel_freq_response, draw_channel, tap_profile)
from jspofdm.ofdm import OfdmParams

P512 = OfdmParams(512, "zp", 36)


def test_awgn(grid_small, rng):
    taps = draw_channel(ChannelModel.awgn(), rng, P512)
    assert taps.tolist() == [1]
    np.testing.assert_array_equal(channel_freq_response(taps, grid_small, OfdmParams(64, "zp", 16)),
                                  np.ones(grid_small.M))


def test_exponential_profile():
    l = np.arange(10)
    expected = np.exp(-l / 3) / np.sum(np.exp(-l / 3))
    np.testing.assert_allclose(tap_profile(ChannelModel.exponential(10, 3.0), P512), expected,
                               rtol=1e-14)


def test_epa_rounding_and_collisions():
    # 7.68 MHz: delays 0,30,70,90,110,190,410 ns -> samples 0,0,1,1,1,1,3
    p = tap_profile(ChannelModel.epa(), P512)
    lin = 10 ** (np.array([0.0, -1.0, -2.0, -3.0, -8.0, -17.2, -20.8]) / 10)
    expected = np.array([lin[0] + lin[1], lin[2] + lin[3] + lin[4] + lin[5], 0.0, lin[6]])
    np.testing.assert_allclose(p, expected / expected.sum(), rtol=1e-14)
    assert EPA_DELAYS_NS[-1] == 410


def test_unit_energy(rng):
    for model in (ChannelModel.epa(), ChannelModel.exponential()):
        taps = draw_channel(model, rng, P512, size=10_000)
        assert np.mean(np.sum(np.abs(taps) ** 2, axis=1)) == pytest.approx(1.0, rel=0.02)


def test_delay_warning():
    with pytest.warns(ChannelDelayWarning):
        tap_profile(ChannelModel.exponential(10, 3.0), OfdmParams(64, "zp", 4))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        tap_profile(ChannelModel.epa(), P512)


@pytest.mark.parametrize("kw", [
    dict(variant="rayleigh_tapped", delays_ns=(0, 10), powers_db=(0,)),
    dict(variant="rayleigh_tapped", delays_ns=(10, 0), powers_db=(0, 0)),
    dict(variant="rayleigh_exp", n_taps=0),
    dict(variant="rician"),
])
def test_invalid_models(kw):
    with pytest.raises(ValueError):
        ChannelModel(**kw)


def test_labels():
    assert ChannelModel.epa().label == "epa"
    assert ChannelModel.exponential().label == "exp"
    assert ChannelModel.awgn().label == "awgn"


def test_freq_response_matches_dft(grid_small, rng):
    p = OfdmParams(64, "zp", 16)
    taps = draw_channel(ChannelModel.exponential(), rng, p)
    H = channel_freq_response(taps, grid_small, p)
    k = grid_small.carriers
    direct = np.array([np.sum(taps * np.exp(-2j * np.pi * kk * np.arange(taps.size) / 64))
                       for kk in k])
    np.testing.assert_allclose(H, direct, atol=1e-12)


def test_apply_channel_is_truncated_convolution(rng):
    x = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    taps = np.array([1.0, 0.5j, -0.25])
    np.testing.assert_allclose(apply_channel(x, taps), np.convolve(x, taps)[:20], atol=1e-14)
