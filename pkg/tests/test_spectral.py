import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jspofdm.grid import build_grid
from jspofdm.ofdm import qpsk_modulate
from jspofdm.precoder import compose_jsp, identity_precoder
from jspofdm.spectral import envelope_oob_power, frequency_set, magnitude_envelope, response_matrix


@pytest.mark.parametrize("w, wm, expected", [(5, 3, 0.5), (-2, 2, 0.25), (180, 150, 1 / 30)])
def test_magnitude_envelope(w, wm, expected):
    assert magnitude_envelope(w, wm) == pytest.approx(expected, rel=1e-15)


def test_envelope_singularity():
    with pytest.raises(ValueError):
        magnitude_envelope(3.0, 3.0)


def test_response_matrix_row():
    g = build_grid(3, 0, "double", [(0, 2)], exclude_dc=False)
    np.testing.assert_allclose(response_matrix([4], g), [[1 / 4, 1 / 3, 1 / 2]], rtol=1e-15)


def test_response_matrix_symmetry(grid300):
    C = response_matrix([-4000, 4000], grid300)
    np.testing.assert_allclose(C[0], C[1][::-1], rtol=1e-14)


def test_response_matrix_rejects_carrier(grid300):
    with pytest.raises(ValueError):
        response_matrix([-4000, 150], grid300)


def test_frequency_set_sorted_readonly(grid300):
    fs = frequency_set([4000, -200, 180], grid300)
    assert fs.tolist() == [-200, 180, 4000]
    with pytest.raises(ValueError):
        fs[0] = 1.0
    with pytest.raises(ValueError):
        frequency_set([np.inf], grid300)


def test_unprecoded_single_carrier():
    g = build_grid(1, 0, "double", [(0, 0)], exclude_dc=False)
    assert envelope_oob_power(identity_precoder(g).P, [10], g)[0] == pytest.approx(0.01)


def test_zero_forced_frequencies(grid300):
    pre = compose_jsp(grid300, [-4000, 4000], [-180, 180])
    ref = envelope_oob_power(identity_precoder(grid300).P, [-180, 180], grid300)
    assert np.all(envelope_oob_power(pre.P, [-180, 180], grid300) <= 1e-20 * ref)


def test_shape_check(grid_small):
    with pytest.raises(ValueError):
        envelope_oob_power(np.ones((grid_small.M, grid_small.N + 1)), [40], grid_small)


def test_monte_carlo_oracle(grid_small, rng):
    P = rng.standard_normal((grid_small.M, grid_small.N))
    w = [33.3, -41.7, 90.1]
    analytic = envelope_oob_power(P, w, grid_small)
    bits = rng.integers(0, 2, size=(100_000, 2 * grid_small.N))
    c = response_matrix(w, grid_small)
    mc = np.mean(np.abs(qpsk_modulate(bits) @ (c @ P).T) ** 2, axis=0)
    np.testing.assert_allclose(mc, analytic, rtol=0.01)


def test_inverse_square_decay():
    g = build_grid(1, 0, "double", [(0, 0)], exclude_dc=False)
    p = envelope_oob_power(identity_precoder(g).P, [10, 100], g)
    assert 10 * np.log10(p[0] / p[1]) == pytest.approx(20.0)


@settings(max_examples=50, deadline=None)
@given(st.floats(30, 1e4), st.floats(0.1, 50), st.integers(0, 2 ** 32 - 1))
def test_phase_invariance_and_monotonicity(w, step, seed):
    g = build_grid(52, 2, "double", [(-27, -1), (1, 27)])
    r = np.random.default_rng(seed)
    P = r.standard_normal((g.M, g.N))
    C = response_matrix([w, w + step], g)
    assert np.all(C > 0) and np.all(C[1] < C[0])
    # Rotating every data symbol by an arbitrary phase leaves E|c^T P d|^2 unchanged.
    phases = np.exp(2j * np.pi * r.random(g.N))
    rotated = np.sum(np.abs((C[:1] @ P) * phases) ** 2)
    assert rotated == pytest.approx(envelope_oob_power(P, [w], g)[0], rel=1e-12)
