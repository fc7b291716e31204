import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jspofdm.errors import ConditioningError, InfeasibleDesignError
from jspofdm.grid import build_grid
from jspofdm.precoder import (DesignSpec, Precoder, baseline_precoder, compose_jsp,
                              condition_number, decoder_matrix, design_under_constraint,
                              identity_precoder, normalize_power, nullspace_projector,
                              svd_tail_basis)
from jspofdm.spectral import response_matrix

CASE_A = dict(omega_a0=(-4000, 4000), omega_b0=(-151.5, 151.5), case="A")


def gram_projector(C):
    """Textbook projector onto null(C) for a full-row-rank C."""
    return np.eye(C.shape[1]) - C.T @ np.linalg.solve(C @ C.T, C)


# -- projectors ---------------------------------------------------------------

def test_projector_axis_aligned():
    np.testing.assert_allclose(nullspace_projector([[1, 0, 0]]), np.diag([0, 1, 1]), atol=1e-15)


def test_projector_two_dims():
    np.testing.assert_allclose(nullspace_projector([[1, 1]]), [[0.5, -0.5], [-0.5, 0.5]],
                               atol=1e-15)


def test_projector_empty_constraint():
    np.testing.assert_array_equal(nullspace_projector(np.zeros((0, 4))), np.eye(4))


def test_projector_rank_deficient():
    with pytest.raises(ConditioningError) as err:
        nullspace_projector([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    assert err.value.tol == pytest.approx(1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.data())
def test_projector_laws(M, data):
    F = data.draw(st.integers(1, M - 1))
    seed = data.draw(st.integers(0, 2 ** 32 - 1))
    C = np.random.default_rng(seed).standard_normal((F, M))
    Pi = nullspace_projector(C)
    assert np.allclose(Pi @ Pi, Pi, atol=1e-12)
    assert np.array_equal(Pi, Pi.T)
    assert np.abs(C @ Pi).max() <= 1e-12 * np.abs(C).max() * M
    assert np.linalg.matrix_rank(Pi, tol=1e-10) == M - F
    np.testing.assert_allclose(Pi, gram_projector(C), atol=1e-10)


def test_projector_is_nearest_point(rng):
    C = rng.standard_normal((2, 8))
    Pi = nullspace_projector(C)
    v = rng.standard_normal(8)
    # any other nullspace point is farther from v
    other = Pi @ rng.standard_normal(8)
    assert np.linalg.norm(Pi @ v - v) <= np.linalg.norm(other - v)


# -- SVD tail basis -----------------------------------------------------------

def test_tail_basis_nullspace():
    P_o, rep = svd_tail_basis([[1.0, 0, 0]], 2)
    assert np.linalg.norm(np.array([[1.0, 0, 0]]) @ P_o) < 1e-15
    np.testing.assert_allclose(P_o @ P_o.T, np.diag([0, 1, 1]), atol=1e-15)
    assert rep.discarded.tolist() == [1.0]


def test_tail_basis_tied_values():
    P_o, rep = svd_tail_basis(np.eye(2), 1)
    assert np.linalg.norm(P_o) == pytest.approx(1.0)
    assert np.linalg.norm(np.eye(2) @ P_o) == pytest.approx(1.0)
    assert rep.residual == pytest.approx(1.0)


def test_tail_basis_random(rng):
    C = rng.standard_normal((2, 6))
    P_o, rep = svd_tail_basis(C, 4)
    np.testing.assert_allclose(P_o.T @ P_o, np.eye(4), atol=1e-12)
    s = np.linalg.svd(C, compute_uv=False)
    tail = np.sum(np.r_[s, np.zeros(4)][-4:] ** 2)
    assert np.linalg.norm(C @ P_o) ** 2 == pytest.approx(tail, abs=1e-12)
    assert rep.retained.tolist() == [0, 0, 0, 0]


def test_tail_basis_minimal_among_orthonormal(rng):
    C = rng.standard_normal((5, 8))
    P_o, _ = svd_tail_basis(C, 4)
    Q, _ = np.linalg.qr(rng.standard_normal((8, 4)))
    assert np.linalg.norm(C @ P_o) <= np.linalg.norm(C @ Q)


def test_tail_basis_shape_errors():
    with pytest.raises(ValueError):
        svd_tail_basis(np.ones((1, 3)), 4)


# -- composition --------------------------------------------------------------

def test_fig4_condition_number(grid300):
    pre = compose_jsp(grid300, [-4000, 4000], [-180, 180])
    # published reference 3.2279; see the ledger for the remaining 2 %
    assert pre.alpha == pytest.approx(3.2279, rel=0.05)
    assert pre.P.shape == (302, 300)


def test_fig4_nulls_outer_but_not_inner(grid300):
    pre = compose_jsp(grid300, [-4000, 4000], [-180, 180])
    Cb = response_matrix(pre.omega_b, grid300)
    Ca = response_matrix(pre.omega_a, grid300)
    assert np.linalg.norm(Cb @ pre.P) / np.linalg.norm(pre.P) <= 1e-10
    assert np.linalg.norm(Ca @ pre.P) / np.linalg.norm(pre.P) > 1e-8


def test_same_inner_and_outer_points(grid_small):
    pre = compose_jsp(grid_small, [-40, 40], [-40, 40])
    C = response_matrix([-40, 40], grid_small)
    ref = np.sum((C @ identity_precoder(grid_small).P) ** 2)
    assert np.sum((C @ pre.P) ** 2) <= 1e-20 * ref


def test_no_reservation_is_identity():
    g = build_grid(8, 0, "double", [(-4, -1), (1, 4)])
    pre = compose_jsp(g, [], [])
    np.testing.assert_array_equal(pre.P, np.eye(8))
    assert pre.alpha == 1.0


def test_singular_optimized_region(grid300):
    with pytest.raises(ConditioningError):
        compose_jsp(grid300, [-4000, 4000], [3990, 3990.0000000001])


def test_decoder_is_left_inverse(grid300):
    pre = compose_jsp(grid300, [-4000, 4000], [-180, 180])
    assert np.linalg.norm(pre.decoder @ pre.P - np.eye(300)) <= 1e-10
    d = np.arange(300.0)
    np.testing.assert_allclose(pre.decode(pre.encode(d)), d, atol=1e-9)


# -- decoder and condition number ---------------------------------------------

def test_decoder_examples(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((6, 3)))
    np.testing.assert_allclose(decoder_matrix(Q), Q.T, atol=1e-14)
    np.testing.assert_allclose(decoder_matrix([[2.0], [0.0]]), [[0.5, 0.0]])
    P = rng.standard_normal((9, 5))
    assert np.linalg.norm(decoder_matrix(P) @ P - np.eye(5)) <= 1e-10
    with pytest.raises(ConditioningError):
        decoder_matrix(np.ones((3, 2)))


def test_condition_number_examples(rng):
    assert condition_number(np.eye(4)) == 1.0
    assert condition_number(np.diag([3.0, 1.0])) == pytest.approx(3.0)
    A = rng.standard_normal((7, 4))
    oracle = np.linalg.norm(A, 2) * np.linalg.norm(np.linalg.pinv(A), 2)
    assert condition_number(A) == pytest.approx(oracle, rel=1e-10)
    assert condition_number(np.diag([1.0, 1e-14])) == np.inf
    with pytest.raises(ValueError):
        condition_number(np.zeros((2, 2)))


# -- baselines ----------------------------------------------------------------

def test_baselines(grid300):
    svd = baseline_precoder("svd_only", grid300, [-180, 180])
    assert svd.alpha == pytest.approx(1.0, abs=1e-12)
    proj = baseline_precoder("projection_only", grid300, [-180, 180])
    C = response_matrix([-180, 180], grid300)
    assert np.linalg.norm(C @ proj.P) / np.linalg.norm(proj.P) <= 1e-10
    jsp = compose_jsp(grid300, [-4000, 4000], [-180, 180])
    assert proj.alpha > jsp.alpha
    with pytest.raises(ValueError):
        baseline_precoder("bogus", grid300, [-180, 180])


def test_normalize_power(grid_small):
    pre = normalize_power(compose_jsp(grid_small, [-700, 700], [-40, 40]))
    assert np.sum(pre.P ** 2) == pytest.approx(pre.M)
    assert np.linalg.norm(pre.decoder @ pre.P - np.eye(pre.N)) <= 1e-10


def test_from_matrix(grid_small, rng):
    pre = Precoder.from_matrix(identity_precoder(grid_small).P, grid_small, "identity")
    assert pre.alpha == 1.0
    with pytest.raises(ValueError):
        Precoder.from_matrix(np.eye(3), grid_small)


# -- constrained design -------------------------------------------------------

def test_alpha_one_is_infeasible(grid300):
    with pytest.raises(InfeasibleDesignError) as err:
        design_under_constraint(DesignSpec(1.0, **CASE_A), grid300)
    assert err.value.alpha > 1.0


@pytest.mark.parametrize("case", ["A", "B"])
def test_design_contract(grid300, case):
    if case == "A":
        kw = CASE_A
    else:
        kw = dict(omega_a0=(-151.5, 151.5), omega_b0=(-4000, 4000), case="B")
    distances = []
    for alpha0 in (1.5, 3, 5, 10, 20):
        res = design_under_constraint(DesignSpec(alpha0, **kw), grid300)
        pre = res.precoder
        assert not res.truncated
        assert pre.alpha <= alpha0
        # recompute the rejected next step from scratch
        nxt = res.trace[-1]
        assert compose_jsp(grid300, nxt.omega_a, nxt.omega_b).alpha > alpha0
        assert res.trace[-2].alpha == pytest.approx(pre.alpha, rel=1e-9)
        moved = pre.omega_b if case == "A" else pre.omega_a
        distances.append(np.max(np.abs(moved)) - 151)
        alphas = [s.alpha for s in res.trace]
        assert np.all(np.diff(alphas) >= -1e-9)
    assert distances == sorted(distances)


def test_truncation_flag(grid300):
    res = design_under_constraint(DesignSpec(20, **CASE_A, max_iterations=5), grid300)
    assert res.truncated and res.iterations == 5
    assert res.precoder.omega_b.tolist() == [-152.5, 152.5]


def test_spacing_guard(grid300):
    spec = DesignSpec(10, omega_a0=(4000,), omega_b0=(152.5, 152.75), side="single_high")
    g = build_grid(300, 2, "single_high", [(-150, -1), (1, 152)])
    with pytest.raises(ConditioningError):
        design_under_constraint(spec, g)


@pytest.mark.parametrize("kw, msg", [
    (dict(alpha0=0.5), "alpha0"),
    (dict(omega_a0=(-4000, 4000, 5000)), "N_a"),
    (dict(omega_b0=(-160, -155, 155)), "N_b"),
    (dict(omega_o=(-200,)), "K="),
    (dict(omega_b0=(155.5, 160.5)), "both sides"),
    (dict(delta_omega=0), "delta_omega"),
])
def test_spec_validation(grid300, kw, msg):
    spec = DesignSpec(**{**dict(alpha0=3, **CASE_A), **kw})
    with pytest.raises(ValueError, match=msg):
        spec.validate(grid300)


def test_reserved_guard():
    g = build_grid(300, 6, "double", [(-153, -1), (1, 153)])
    with pytest.raises(ValueError, match="max_reserved"):
        DesignSpec(3, **CASE_A).validate(g)
