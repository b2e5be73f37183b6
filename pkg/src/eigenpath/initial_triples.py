"""Start systems for the homotopy: the rank-one diagonal start, the
hexagonal-lattice diagonal start, and the rejection-sampled random start
that yields a Gaussian-like matrix together with one of its eigenpairs
without ever solving an eigenproblem."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conditioning import EigenTriple
from .errors import BudgetExceededError
from .linalg import (
    as_matrix,
    sample_gaussian_matrix,
    sample_gaussian_vector,
    sample_haar_unitary,
)
from .rng import RngStream

_OMEGA_PROPOSAL_CAP = 1_000_000


def single_start(n: int) -> EigenTriple:
    """The rank-one diagonal start: diag(1, 0, ..., 0) with eigenpair (1, e1)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    H = np.zeros((n, n), dtype=np.complex128)
    H[0, 0] = 1.0
    e1 = np.zeros(n, dtype=np.complex128)
    e1[0] = 1.0
    return EigenTriple.build(H, 1.0, e1)


@dataclass(frozen=True)
class HexLattice:
    """The ``n`` smallest points of the unit-side hexagonal lattice, ordered
    by modulus with ties broken by principal argument in [0, 2 pi)."""

    n: int
    etas: np.ndarray


def hex_lattice(n: int) -> HexLattice:
    if n < 2:
        raise ValueError("n must be at least 2")
    # Enumeration radius large enough by the lattice counting bound
    # 2 pi r^2 / sqrt(3) - 4 sqrt(2) r - 2 >= n.
    L = math.ceil(2.0 * math.sqrt(n)) + 2
    pts = []
    for a in range(-L, L + 1):
        for b in range(-L, L + 1):
            eta = (a + 0.5 * b) + 1j * (math.sqrt(3.0) / 2.0) * b
            norm2 = a * a + a * b + b * b  # |eta|^2, exact in integers
            arg = math.atan2(eta.imag, eta.real) % (2.0 * math.pi)
            pts.append((norm2, arg, eta))
    pts.sort(key=lambda t: (t[0], t[1]))
    if len(pts) < n:
        raise AssertionError("lattice enumeration radius too small")
    etas = np.array([p[2] for p in pts[:n]], dtype=np.complex128)
    return HexLattice(n=n, etas=etas)


def hex_diagonal(n: int):
    """Diagonal start matrix D = diag(eta_1..eta_n) and its n exact eigen
    triples (D, eta_j, e_j)."""
    lattice = hex_lattice(n)
    D = np.diag(lattice.etas)
    eye = np.eye(n, dtype=np.complex128)
    triples = [EigenTriple.build(D, lattice.etas[j], eye[:, j]) for j in range(n)]
    return D, triples


@dataclass(frozen=True)
class OmegaSample:
    """An accepted point of the rejection-sampled parameter space.

    ``Q`` has orthonormal columns spanning the complement of ker(M), and the
    acceptance constraint 2 Re(conj(lambda) tr(MQ)) <= 1 - |lambda|^2 (n-1)
    holds.
    """

    lam: complex
    w: np.ndarray
    M: np.ndarray
    Q: np.ndarray


def _accepts(lam: complex, MQ: np.ndarray, n: int) -> bool:
    return 2.0 * (np.conj(lam) * np.trace(MQ)).real <= 1.0 - abs(lam) ** 2 * (n - 1)


def sample_omega(rng: RngStream, n: int):
    """Rejection-sample one parameter point; returns ``(sample, proposals_used)``.

    Per proposal: a Haar unitary U of size n-1, a scalar Gaussian lambda and
    an (n-1) x n Gaussian M; the kernel of M comes from its SVD, a unitary H
    with that kernel as last column from one QR factorization, and
    ``Q = H[:, :n-1] @ U``.  The expected number of proposals is at most 4n.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    for proposals in range(1, _OMEGA_PROPOSAL_CAP + 1):
        U = sample_haar_unitary(rng, n - 1)
        lam = complex(sample_gaussian_vector(rng, 1)[0])
        M = sample_gaussian_matrix(rng, n - 1, n)
        _u, _s, Vh = np.linalg.svd(M, full_matrices=True)
        kernel = Vh[-1].conj()
        stacked = np.concatenate((kernel[:, None], M.conj().T), axis=1)
        Hq, _r = np.linalg.qr(stacked, mode="reduced")
        H = np.concatenate((Hq[:, 1:], Hq[:, :1]), axis=1)
        Q = H[:, : n - 1] @ U
        MQ = M @ Q
        if _accepts(lam, MQ, n):
            w = sample_gaussian_vector(rng, n - 1)
            return OmegaSample(lam=lam, w=w, M=M, Q=Q), proposals
    raise BudgetExceededError("rejection sampler exhausted its proposal cap")


def psi(sample: OmegaSample) -> EigenTriple:
    """Assemble the start triple: a block upper-triangular matrix with
    ``(lambda, e1)`` as an exact eigenpair."""
    lam = complex(sample.lam)
    w = as_matrix(sample.w, "w").ravel()
    n = w.size + 1
    A0 = np.zeros((n, n), dtype=np.complex128)
    A0[0, 0] = lam
    A0[0, 1:] = np.conj(w)
    A0[1:, 1:] = sample.M @ sample.Q + lam * np.eye(n - 1)
    e1 = np.zeros(n, dtype=np.complex128)
    e1[0] = 1.0
    return EigenTriple.build(A0, lam, e1)


def random_initial_triple(rng: RngStream, n: int) -> EigenTriple:
    """Composition sample -> assemble: a random start triple on the variety."""
    sample, _proposals = sample_omega(rng, n)
    return psi(sample)


@dataclass(frozen=True)
class Trick2Estimate:
    """Two-sided Monte-Carlo estimate of the kernel-pair identity
    E_M E_Q alpha(MQ) = E_B alpha(B) |det B|^2 / (n-1)!."""

    lhs_mean: float
    lhs_stderr: float
    rhs_mean: float
    rhs_stderr: float
    trials: int


def montecarlo_trick2(rng: RngStream, n: int, trials: int, alpha_fn) -> Trick2Estimate:
    """Estimate both sides of the identity with ``trials`` samples each.

    ``alpha_fn`` maps an (n-1) x (n-1) complex matrix to a nonnegative real.
    Draws are batched; determinism follows from the stream's fixed draw order.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if trials < 2:
        raise ValueError("trials must be at least 2")
    m = n - 1
    gamma_n = math.factorial(n - 1)

    lhs = np.empty(trials)
    rhs = np.empty(trials)
    batch = 4096
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        G = sample_gaussian_matrix(rng, b * m, m).reshape(b, m, m)
        Qb, Rb = np.linalg.qr(G)
        d = np.diagonal(Rb, axis1=1, axis2=2).copy()
        d = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
        U = Qb * d[:, np.newaxis, :]
        M = sample_gaussian_matrix(rng, b * m, n).reshape(b, m, n)
        _u, _s, Vh = np.linalg.svd(M, full_matrices=True)
        kernel = Vh[:, -1, :].conj()
        stacked = np.concatenate((kernel[:, :, None], M.conj().transpose(0, 2, 1)), axis=2)
        Hq, _r = np.linalg.qr(stacked)
        Hmat = np.concatenate((Hq[:, :, 1:], Hq[:, :, :1]), axis=2)
        Q = Hmat[:, :, :m] @ U
        MQ = M @ Q
        B = sample_gaussian_matrix(rng, b * m, m).reshape(b, m, m)
        det2 = np.abs(np.linalg.det(B)) ** 2
        for i in range(b):
            lhs[done + i] = float(alpha_fn(MQ[i]))
            rhs[done + i] = float(alpha_fn(B[i])) * det2[i] / gamma_n
        done += b

    return Trick2Estimate(
        lhs_mean=float(lhs.mean()),
        lhs_stderr=float(lhs.std(ddof=1) / np.sqrt(trials)),
        rhs_mean=float(rhs.mean()),
        rhs_stderr=float(rhs.std(ddof=1) / np.sqrt(trials)),
        trials=trials,
    )
