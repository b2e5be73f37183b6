import numpy as np
import pytest

import eigenpath as ep
from eigenpath.errors import IllPosedError
from eigenpath.rng import RngStream

import helpers


def test_newton_step_diagonal_example():
    A = np.diag([1.0 + 0j, 2.0])
    p = ep.ApproxEigenpair(zeta=1.1, w=np.array([1.0 + 0j, 0.0]))
    nxt, step = ep.newton_step(A, p)
    assert np.isclose(nxt.zeta, 1.0)
    assert np.allclose(nxt.w, [1.0, 0.0])
    assert np.isclose(step.beta, 0.1)
    assert np.isclose(step.lambda_dot, 0.1)
    assert np.linalg.norm(step.v_dot) == 0.0


def test_newton_fixed_point_on_exact_pair():
    A, lam, v = helpers.triangular_triple(40, 5, max_mu=100.0)
    p = ep.ApproxEigenpair(zeta=lam, w=v)
    nxt, step = ep.newton_step(A, p)
    assert step.beta <= 1e-10
    assert abs(nxt.zeta - lam) <= 1e-10
    assert ep.beta(A, p) <= 1e-10


def test_newton_step_matches_fullspace_reference():
    A = np.array([[1.0, 0.1], [0.0, 2.0]], dtype=np.complex128)
    w = np.array([1.0, 0.05], dtype=np.complex128)
    w = w / np.linalg.norm(w)
    p = ep.ApproxEigenpair(zeta=0.95, w=w)
    nxt, step = ep.newton_step(A, p)
    z_ref, w_ref, ld_ref, vd_ref, b_ref = helpers.newton_reference(A, 0.95, w)
    assert abs(nxt.zeta - z_ref) <= 1e-12
    assert helpers.phase_aligned_diff(nxt.w, w_ref) <= 1e-12
    assert abs(step.lambda_dot - ld_ref) <= 1e-12
    assert np.linalg.norm(step.v_dot - vd_ref) <= 1e-12
    assert abs(step.beta - b_ref) <= 1e-12


def test_newton_step_random_vs_reference():
    for c in range(25):
        rng = RngStream(41, c)
        n = 3 + c % 5
        A = ep.sample_gaussian_matrix(rng, n, n)
        w = ep.sample_gaussian_matrix(rng, n, 1).ravel()
        zeta = complex(ep.sample_gaussian_matrix(rng, 1, 1)[0, 0])
        p = ep.ApproxEigenpair(zeta=zeta, w=w)
        nxt, step = ep.newton_step(A, p)
        z_ref, w_ref, _ld, _vd, b_ref = helpers.newton_reference(A, zeta, p.w)
        assert abs(nxt.zeta - z_ref) <= 1e-10 * max(1.0, abs(z_ref))
        assert helpers.phase_aligned_diff(nxt.w, w_ref) <= 1e-10
        assert abs(step.beta - b_ref) <= 1e-10 * max(1.0, b_ref)
        assert abs(np.vdot(step.v_dot, p.w)) <= 1e-12 * max(1.0, np.linalg.norm(step.v_dot))


def test_newton_undefined_on_singular_block():
    J = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
    p = ep.ApproxEigenpair(zeta=0.0, w=np.array([1.0 + 0j, 0.0]))
    with pytest.raises(IllPosedError):
        ep.newton_step(J, p)
    with pytest.raises(IllPosedError):
        ep.beta(J, p)


def test_newton_iterate_k0_and_negative():
    A = np.diag([1.0 + 0j, 2.0])
    p = ep.ApproxEigenpair(zeta=1.05, w=np.array([1.0 + 0j, 0.0]))
    assert ep.newton_iterate(A, p, 0) is not None
    q = ep.newton_iterate(A, p, 0)
    assert q.zeta == p.zeta and np.array_equal(q.w, p.w)
    with pytest.raises(ValueError):
        ep.newton_iterate(A, p, -1)


def test_projective_consistency():
    for c in range(15):
        A, lam, v = helpers.triangular_triple(42 + c, 4, max_mu=100.0)
        rng = RngStream(42, c)
        zeta, w = helpers.perturbed_pair(rng, A, lam, v, 1e-2)
        theta = 2.0 * np.pi * rng.generator.random()
        p1 = ep.newton_step(A, ep.ApproxEigenpair(zeta=zeta, w=w))[0]
        p2 = ep.newton_step(A, ep.ApproxEigenpair(zeta=zeta, w=np.exp(1j * theta) * w))[0]
        assert abs(p1.zeta - p2.zeta) <= 1e-12 * max(1.0, abs(p1.zeta))
        assert helpers.phase_aligned_diff(p1.w, p2.w) <= 1e-12


def test_beta_prescaled_diagonal_example():
    A = np.diag([1.0 + 0j, 2.0]) / np.sqrt(5.0)
    p = ep.ApproxEigenpair(zeta=1.0 / np.sqrt(5.0) + 0.01, w=np.array([1.0 + 0j, 0.0]))
    assert np.isclose(ep.beta(A, p), 0.01)


def test_df_inverse_bound():
    # ||(DF|_{C x w-perp})^{-1}|| <= 3 mu for unit-norm A and |zeta| <= 1
    for c in range(30):
        rng = RngStream(43, c)
        n = 3 + c % 5
        A = ep.sample_gaussian_matrix(rng, n, n)
        A = A / ep.frobenius_norm(A)
        w = ep.sample_gaussian_matrix(rng, n, 1).ravel()
        w = w / np.linalg.norm(w)
        z = complex(ep.sample_gaussian_matrix(rng, 1, 1)[0, 0])
        zeta = z / max(1.0, abs(z))
        m = ep.mu(A, zeta, w)
        if not np.isfinite(m):
            continue
        assert helpers.df_inverse_norm(A, zeta, w) <= 3.0 * m * (1.0 + 1e-10)


def test_certify_radius():
    assert np.isclose(ep.certify_radius(1.0), 0.2)
    assert np.isclose(ep.certify_radius(1.0 / np.sqrt(2.0)), 0.2 * np.sqrt(2.0))
    with pytest.raises(ValueError):
        ep.certify_radius(0.5)
    with pytest.raises(ValueError):
        ep.certify_radius(float("inf"))


def test_contraction_suite():
    helpers.check_quadratic_contraction(40)


def test_homogeneity_suite():
    helpers.check_newton_homogeneity(40)


def test_beta_bracket_suite():
    helpers.check_beta_brackets(40)
