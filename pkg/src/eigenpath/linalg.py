"""Dense complex linear algebra primitives and random matrix samplers.

Matrices and vectors are plain ``numpy.ndarray`` of ``complex128``; public
operations validate finiteness and shapes and raise ``ValueError`` on
argument errors.  Factorizations are LAPACK-backed through NumPy; the
Householder frame shares its implementation with the hot kernels.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import BudgetExceededError
from .rng import RngStream

# Relative rank cutoff: singular values below PINV_RCOND * sigma_1 are zero.
PINV_RCOND = 1e-13

# Frobenius truncation threshold T = sqrt(2) * n for the truncated Gaussian.
_TRUNCATION_PROPOSAL_CAP = 1_000_000


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite, C-contiguous complex128 array (1-D or 2-D)."""
    arr = np.ascontiguousarray(a, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def frobenius_inner(A, B) -> complex:
    """Frobenius Hermitian product trace(B* A)."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(B, A))


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(A))


def qr_decompose(A):
    """Thin QR factorization: A = Q R, Q with orthonormal columns."""
    A = as_matrix(A)
    Q, R = np.linalg.qr(A, mode="reduced")
    return Q, R


def svd(A):
    """Singular value decomposition A = U diag(s) Vh.

    Returns ``(s, U, Vh)`` with ``s`` in descending order.
    """
    A = as_matrix(A)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    return s, U, Vh


def pseudoinverse(A, rcond: float = PINV_RCOND) -> np.ndarray:
    """Moore-Penrose pseudoinverse with relative rank cutoff ``rcond``."""
    s, U, Vh = svd(A)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=np.complex128)
    inv = np.where(s > rcond * s[0], 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return (Vh.conj().T * inv) @ U.conj().T


def householder_frame(v) -> np.ndarray:
    """Unitary ``U_v`` with ``U_v e1 = v/||v||`` (single reflector, phase fix)."""
    v = as_matrix(v, "v").ravel()
    if np.linalg.norm(v) == 0.0:
        raise ValueError("cannot build a frame for the zero vector")
    return kernels.householder_unitary(v)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------


def _standard_complex(rng: RngStream, shape) -> np.ndarray:
    g = rng.generator.standard_normal(shape + (2,))
    return (g[..., 0] + 1j * g[..., 1]) / np.sqrt(2.0)


def sample_gaussian_matrix(rng: RngStream, rows: int, cols: int, center=None, sigma: float = 1.0) -> np.ndarray:
    """Entrywise i.i.d. complex Gaussian N_C(center_ij, sigma^2).

    Real and imaginary parts are independent N(., sigma^2/2).
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    A = sigma * _standard_complex(rng, (int(rows), int(cols)))
    if center is not None:
        A = A + as_matrix(center, "center")
    return A


def sample_gaussian_vector(rng: RngStream, dim: int, sigma: float = 1.0) -> np.ndarray:
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    return sigma * _standard_complex(rng, (int(dim),))


def truncation_threshold(n: int) -> float:
    """Frobenius threshold T = sqrt(2) n of the truncated Gaussian."""
    return np.sqrt(2.0) * n


def sample_truncated_gaussian(rng: RngStream, n: int, center=None, sigma: float = 1.0) -> np.ndarray:
    """Rejection sampling of N(center, sigma^2) conditioned on ||A||_F <= sqrt(2) n.

    The sigma <= 1 regime has acceptance probability >= 1/2 for center 0.
    """
    if not (0.0 < sigma <= 1.0):
        raise ValueError("sigma must lie in (0, 1]")
    T = truncation_threshold(n)
    for _ in range(_TRUNCATION_PROPOSAL_CAP):
        A = sample_gaussian_matrix(rng, n, n, center=center, sigma=sigma)
        if np.linalg.norm(A) <= T:
            return A
    raise BudgetExceededError("truncated-Gaussian rejection sampler exhausted its proposal cap")


def sample_haar_unitary(rng: RngStream, n: int) -> np.ndarray:
    """Haar-distributed unitary: QR of a Ginibre draw with the R-diagonal
    phase correction applied to the columns of Q."""
    if n < 1:
        raise ValueError("n must be at least 1")
    G = _standard_complex(rng, (n, n))
    Q, R = np.linalg.qr(G)
    d = np.diagonal(R).copy()
    d = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return Q * d[np.newaxis, :]
