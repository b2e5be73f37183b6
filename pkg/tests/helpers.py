"""Shared test utilities: independent reference routes (full-space
pseudoinverse forms), exact solution-variety generators, and the property
suites that run at small scale in the unit tests and at full scale in the
acceptance gate."""

from __future__ import annotations

import numpy as np

import eigenpath as ep
from eigenpath.linalg import (
    pseudoinverse,
    sample_gaussian_matrix,
    sample_gaussian_vector,
    sample_haar_unitary,
)
from eigenpath.rng import RngStream


def unit_vector(rng, n):
    v = sample_gaussian_vector(rng, n)
    return v / np.linalg.norm(v)


def phase_aligned_diff(x, y):
    """||x - e^{i phi} y|| minimized over the phase: projective agreement at
    full double precision (proj_distance bottoms out near sqrt(eps))."""
    x = np.asarray(x) / np.linalg.norm(x)
    y = np.asarray(y) / np.linalg.norm(y)
    inner = np.vdot(y, x)
    if abs(inner) == 0.0:
        return float(np.sqrt(2.0))
    return float(np.linalg.norm(x - y * (inner / abs(inner))))


def triangular_triple(seed, n, max_mu=None, sphere=False):
    """Exact V-point: A = U T U* (T upper triangular) with eigenpair
    (T[0,0], U e1); the residual is at machine scale by construction.

    With ``max_mu`` the draw is repeated until mu is below the bound; with
    ``sphere`` the triple is rescaled onto the unit Frobenius sphere.
    """
    for attempt in range(64):
        rng = RngStream(seed + 7919 * attempt, 0)
        T = np.triu(sample_gaussian_matrix(rng, n, n))
        U = sample_haar_unitary(rng, n)
        A = U @ T @ U.conj().T
        lam = complex(T[0, 0])
        v = U[:, 0].copy()
        if sphere:
            nrm = ep.frobenius_norm(A)
            A = A / nrm
            lam = lam / nrm
        if max_mu is None or ep.mu(A, lam, v) <= max_mu:
            return A, lam, v
    raise AssertionError("could not draw a triple under the mu bound")


def projected_operator(A, zeta, w):
    """(I - ww*)(A - zeta I)(I - ww*) for unit w: the full-space form of the
    reduced operator."""
    n = A.shape[0]
    w = w / np.linalg.norm(w)
    P = np.eye(n, dtype=np.complex128) - np.outer(w, w.conj())
    return P @ (A - complex(zeta) * np.eye(n)) @ P


def mu_reference(A, zeta, w):
    """mu via the operator norm of the projected pseudoinverse."""
    G = projected_operator(A, zeta, w)
    return ep.frobenius_norm(A) * float(np.linalg.norm(pseudoinverse(G), ord=2))


def newton_reference(A, zeta, w):
    """Full-space pseudoinverse evaluation of the Newton update formulas.

    Returns (zeta_next, w_next, lambda_dot, v_dot, beta).
    """
    A = np.asarray(A, dtype=np.complex128)
    n = A.shape[0]
    w = np.asarray(w, dtype=np.complex128)
    w = w / np.linalg.norm(w)
    zeta = complex(zeta)
    G = projected_operator(A, zeta, w)
    vdot = pseudoinverse(G) @ (A @ w)
    lamdot = np.vdot(w, (zeta * np.eye(n) - A) @ (w - vdot))
    beta = float(np.sqrt(abs(lamdot) ** 2 + np.linalg.norm(vdot) ** 2))
    wn = w - vdot
    wn = wn / np.linalg.norm(wn)
    return zeta - lamdot, wn, complex(lamdot), vdot, beta


def df_inverse_norm(A, zeta, w):
    """Operator norm of (DF_A(zeta, w)|_{C x w-perp})^{-1} built explicitly in
    the Householder frame (block-triangular form)."""
    n = A.shape[0]
    U = ep.householder_frame(w)
    M = U.conj().T @ A @ U
    block = M[1:, 1:] - complex(zeta) * np.eye(n - 1)
    T = np.zeros((n, n), dtype=np.complex128)
    T[0, 0] = -1.0
    T[0, 1:] = M[0, 1:]
    T[1:, 1:] = block
    return float(1.0 / np.linalg.svd(T, compute_uv=False)[-1])


def perturbed_pair(rng, A, lam, v, dist_target):
    """A pair (zeta, w) at dist_A approximately ``dist_target`` from (lam, v)."""
    n = v.size
    nrm = ep.frobenius_norm(A)
    dz = sample_gaussian_vector(rng, 1)[0]
    dv = sample_gaussian_vector(rng, n)
    dv = dv - np.vdot(v, dv) * v  # tangent direction
    if np.linalg.norm(dv) == 0.0:
        dv = np.zeros(n, dtype=np.complex128)
    t = np.sqrt(0.5) * dist_target
    zeta = lam + t * nrm * dz / abs(dz)
    w = v + t * dv / np.linalg.norm(dv)
    w = w / np.linalg.norm(w)
    return complex(zeta), w


# ---------------------------------------------------------------------------
# Property suites (criterion 9 runs these with cases >= 200)
# ---------------------------------------------------------------------------


def check_mu_invariance(cases, rtol=1e-10, seed=2201):
    for c in range(cases):
        rng = RngStream(seed, c)
        n = 3 + c % 5
        A = sample_gaussian_matrix(rng, n, n)
        zeta = complex(sample_gaussian_vector(rng, 1)[0])
        w = unit_vector(rng, n)
        m0 = ep.mu(A, zeta, w)
        if not np.isfinite(m0):
            continue
        U = sample_haar_unitary(rng, n)
        m1 = ep.mu(U @ A @ U.conj().T, zeta, U @ w)
        assert abs(m1 - m0) <= rtol * m0 * 10 + rtol, (c, m0, m1)
        s = complex(sample_gaussian_vector(rng, 1)[0])
        if abs(s) < 1e-3:
            s = 1.0 + 1.0j
        m2 = ep.mu(s * A, s * zeta, w)
        assert abs(m2 - m0) <= rtol * m0, (c, m0, m2)


def check_mu_lower_bounds(cases, seed=2202):
    for c in range(cases):
        n = 3 + c % 5
        A, lam, v = triangular_triple(seed + c, n)
        assert ep.mu(A, lam, v) >= 1.0 / np.sqrt(2.0) - 1e-12, c
        rng = RngStream(seed, c)
        B = sample_gaussian_matrix(rng, n, n)
        w = unit_vector(rng, n)
        z = sample_gaussian_vector(rng, 1)[0]
        zeta = z / abs(z) * rng.generator.random() * ep.frobenius_norm(B)
        assert ep.mu(B, zeta, w) >= 0.5 - 1e-12, c


def check_normal_formula(cases, rtol=1e-9, seed=2203):
    for c in range(cases):
        rng = RngStream(seed, c)
        n = 3 + c % 5
        d = sample_gaussian_vector(rng, n)
        U = sample_haar_unitary(rng, n)
        A = (U * d[np.newaxis, :]) @ U.conj().T
        nrm = ep.frobenius_norm(A)
        for j in range(n):
            gap = min(abs(d[k] - d[j]) for k in range(n) if k != j)
            if gap < 1e-3:
                continue
            expected = nrm / gap
            got = ep.mu(A, d[j], U[:, j])
            assert abs(got - expected) <= rtol * expected * 10, (c, j, got, expected)


def check_newton_homogeneity(cases, tol=1e-10, seed=2204):
    for c in range(cases):
        n = 3 + c % 5
        A, lam, v = triangular_triple(seed + c, n, max_mu=200.0)
        rng = RngStream(seed, c)
        zeta, w = perturbed_pair(rng, A, lam, v, 1e-3)
        z = complex(sample_gaussian_vector(rng, 1)[0])
        if abs(z) < 1e-2:
            z = 0.3 - 1.1j
        p = ep.ApproxEigenpair(zeta=zeta, w=w)
        q = ep.ApproxEigenpair(zeta=z * zeta, w=w)
        pk = ep.newton_iterate(A, p, 3)
        qk = ep.newton_iterate(z * A, q, 3)
        assert abs(qk.zeta - z * pk.zeta) <= tol * max(1.0, abs(z * pk.zeta)), c
        assert phase_aligned_diff(qk.w, pk.w) <= tol, c


def check_quadratic_contraction(cases, seed=2205, kmax=4):
    for c in range(cases):
        n = 3 + c % 4
        A, lam, v = triangular_triple(seed + c, n, max_mu=60.0, sphere=True)
        m = ep.mu(A, lam, v)
        radius = ep.certify_radius(m)
        rng = RngStream(seed, c)
        zeta, w = perturbed_pair(rng, A, lam, v, 0.5 * radius)
        d0 = ep.dist_A(A, (zeta, w), (lam, v))
        assert d0 <= radius
        pair = ep.ApproxEigenpair(zeta=zeta, w=w)
        for k in range(1, kmax + 1):
            pair = ep.newton_step(A, pair)[0]
            dk = ep.dist_A(A, (pair.zeta, pair.w), (lam, v))
            bound = (0.5) ** (2**k - 1) * d0
            assert dk <= bound * (1.0 + 1e-6) + 5e-13, (c, k, dk, bound)


def check_beta_brackets(cases, seed=2206):
    for c in range(cases):
        n = 3 + c % 5
        A, lam, v = triangular_triple(seed + c, n, max_mu=60.0, sphere=True)
        m = ep.mu(A, lam, v)
        rng = RngStream(seed, c)
        zeta, w = perturbed_pair(rng, A, lam, v, 0.4 * ep.certify_radius(m))
        pair = ep.ApproxEigenpair(zeta=zeta, w=w)
        nxt, step = ep.newton_step(A, pair)
        d_step = ep.dist_A(A, (zeta, w), (nxt.zeta, nxt.w))
        assert d_step <= step.beta * (1.0 + 1e-12) + 1e-15, c
        if np.linalg.norm(step.v_dot) <= 1.0 / 3.0:
            assert 0.9 * step.beta <= d_step * (1.0 + 1e-12) + 1e-15, c
        b = step.beta
        if b <= 1.0 / 3.0:
            d_true = ep.dist_A(A, (zeta, w), (lam, v))
            assert d_true <= 2.0 * b * (1.0 + 1e-10) + 1e-14, c
            assert d_true >= 0.5 * b * (1.0 - 1e-10) - 1e-14, c


def check_lipschitz_window(cases, seed=2207, eps=0.5):
    for c in range(cases):
        n = 3 + c % 5
        A, lam, v = triangular_triple(seed + c, n, max_mu=200.0, sphere=True)
        m0 = ep.mu(A, lam, v)
        budget = eps / (4.0 * np.sqrt(3.0) * m0)
        rng = RngStream(seed, c)
        E = sample_gaussian_matrix(rng, n, n)
        E = E / ep.frobenius_norm(E) * (0.4 * budget)
        A2 = A + E
        A2 = A2 / ep.frobenius_norm(A2)
        zeta, w = perturbed_pair(rng, A2, lam, v, 0.4 * budget)
        d = ep.triple_distance((A, lam, v), (A2, zeta, w))
        if m0 * d > eps / (4.0 * np.sqrt(3.0)):
            continue
        m1 = ep.mu(A2, zeta, w)
        assert m1 <= (1.0 + eps) * m0 * (1.0 + 1e-12), (c, m0, m1)
        assert m1 >= m0 / (1.0 + eps) * (1.0 - 1e-12), (c, m0, m1)


def check_choose_step_floor(cases, seed=2208):
    L = ep.DEFAULT_LEDGER
    for c in range(cases):
        n = 3 + c % 5
        A, lam, v = triangular_triple(seed + c, n, max_mu=500.0, sphere=True)
        rng = RngStream(seed, c)
        T = sample_gaussian_matrix(rng, n, n)
        T = T - np.real(np.vdot(A, T)) * A
        T = T / ep.frobenius_norm(T)
        ds = ep.choose_step(A, T, lam, v)
        m = ep.mu(A, lam, v)
        assert ds >= L.R / m**2 * (1.0 - 1e-10), (c, ds, L.R / m**2)
        assert ds <= L.c1 / m * (1.0 + 1e-8), (c, ds, L.c1 / m)
