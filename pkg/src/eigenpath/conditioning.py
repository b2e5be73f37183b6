"""The reduced operator, the condition number mu and its variants, and the
left eigenvector.

``mu`` is evaluated through the (n-1)-dimensional block in a Householder
frame; the full-space projected-pseudoinverse form is kept in the tests as an
independent oracle.  A reduced block whose smallest singular value falls
below ``1e-13`` of its largest is treated as singular and ``mu`` is +inf,
flagging an ill-posed triple.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import IllPosedError
from .linalg import as_matrix, frobenius_norm, householder_frame

# Minimum eigenvalue gap (relative to ||A||_F) below which a matrix is treated
# as a member of the discriminant variety.
SIGMA_GAP_RTOL = 1e-8


def _unit(v) -> np.ndarray:
    v = as_matrix(v, "v").ravel()
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("eigenvector representative must be nonzero")
    return v / n


@dataclass(frozen=True)
class EigenTriple:
    """A point (A, lambda, v) of the solution variety, with residual witness."""

    matrix: np.ndarray
    eigenvalue: complex
    eigenvector: np.ndarray
    residual: float = field(default=0.0)

    @classmethod
    def build(cls, A, eigenvalue, eigenvector) -> "EigenTriple":
        A = as_matrix(A, "A")
        v = _unit(eigenvector)
        lam = complex(eigenvalue)
        res = float(np.linalg.norm(A @ v - lam * v))
        return cls(matrix=A, eigenvalue=lam, eigenvector=v, residual=res)


@dataclass(frozen=True)
class ReducedOperator:
    """The compression of A - lambda Id to v-perp, in frame coordinates.

    ``basis`` is the Householder unitary with first column v/||v||, ``block``
    the (n-1) x (n-1) matrix of the operator in that basis.
    """

    basis: np.ndarray
    block: np.ndarray


def reduced_operator(A, lam, v) -> ReducedOperator:
    A = as_matrix(A, "A")
    v = _unit(v)
    U = householder_frame(v)
    M = U.conj().T @ A @ U
    block = M[1:, 1:] - complex(lam) * np.eye(A.shape[0] - 1)
    return ReducedOperator(basis=U, block=np.ascontiguousarray(block))


def _block_singulars(A, lam, v):
    block = reduced_operator(A, lam, v).block
    return np.linalg.svd(block, compute_uv=False)


def mu(A, lam, v) -> float:
    """Condition number ||A||_F * ||reduced_block^{-1}||, +inf when singular."""
    nA = frobenius_norm(A)
    if nA == 0.0:
        raise ValueError("mu is undefined for the zero matrix")
    s = _block_singulars(A, lam, v)
    if s[-1] <= kernels.RANK_RCOND * s[0] or s[0] == 0.0:
        return float("inf")
    return float(nA / s[-1])


def mu_frobenius(A, lam, v) -> float:
    """Frobenius variant: ||A||_F * ||reduced_block^{-1}||_F."""
    nA = frobenius_norm(A)
    if nA == 0.0:
        raise ValueError("mu_frobenius is undefined for the zero matrix")
    s = _block_singulars(A, lam, v)
    if s[-1] <= kernels.RANK_RCOND * s[0] or s[0] == 0.0:
        return float("inf")
    return float(nA * np.sqrt(np.sum(1.0 / s**2)))


def _oracle_triples(A):
    from . import oracle  # deferred: oracle depends on this module's types

    return oracle.reference_eigenpairs(A)


def _eigenvalue_min_gap(lams) -> float:
    lams = np.asarray(lams)
    n = lams.size
    if n < 2:
        return float("inf")
    diff = np.abs(lams[:, None] - lams[None, :])
    diff[np.diag_indices(n)] = np.inf
    return float(diff.min())


def mu_max(A, triples=None) -> float:
    """max_j mu(A, lambda_j, v_j) over all eigenpairs (oracle-backed).

    Returns +inf for matrices with a repeated eigenvalue at the oracle gap
    tolerance (membership in the discriminant variety).
    """
    A = as_matrix(A, "A")
    if triples is None:
        triples = _oracle_triples(A)
    gap = _eigenvalue_min_gap([t.eigenvalue for t in triples])
    if gap < SIGMA_GAP_RTOL * frobenius_norm(A):
        return float("inf")
    return max(mu(A, t.eigenvalue, t.eigenvector) for t in triples)


def mu_av(A, triples=None) -> float:
    """Root mean square of mu over the n eigenpairs."""
    A = as_matrix(A, "A")
    if triples is None:
        triples = _oracle_triples(A)
    vals = np.array([mu(A, t.eigenvalue, t.eigenvector) for t in triples])
    return float(np.sqrt(np.mean(vals**2)))


def mu_F_av(A, triples=None) -> float:
    """Root mean square of mu_frobenius over the n eigenpairs."""
    A = as_matrix(A, "A")
    if triples is None:
        triples = _oracle_triples(A)
    vals = np.array([mu_frobenius(A, t.eigenvalue, t.eigenvector) for t in triples])
    return float(np.sqrt(np.mean(vals**2)))


def left_eigenvector(A, lam, v) -> np.ndarray:
    """Left eigenvector u with (A - lambda Id)* u = 0, normalized so that
    <u, v> = ||v||^2 = 1."""
    A = as_matrix(A, "A")
    v = _unit(v)
    lam = complex(lam)
    U = householder_frame(v)
    M = U.conj().T @ A @ U
    block = M[1:, 1:] - lam * np.eye(A.shape[0] - 1)
    s = np.linalg.svd(block, compute_uv=False)
    if s[-1] <= kernels.RANK_RCOND * s[0] or s[0] == 0.0:
        raise IllPosedError("left eigenvector is undefined: singular reduced operator")
    a = np.conj(M[0, 1:])  # first off-row of M holds a*
    z = np.linalg.solve(block.conj().T, a)
    uf = np.concatenate((np.array([1.0 + 0.0j]), -z))
    return U @ uf


def mu_lambda(A, lam, v) -> float:
    """Eigenvalue condition number ||u|| / ||v|| for unit v."""
    u = left_eigenvector(A, lam, v)
    return float(np.linalg.norm(u))
