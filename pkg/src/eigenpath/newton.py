"""The eigenpair Newton operator, its step length beta, and the
certification radius of approximate eigenpairs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import IllPosedError
from .linalg import as_matrix

# Radius constant of the approximate-eigenpair theorem: any (zeta, w) within
# dist_A <= C0/mu(A, lambda, v) of an eigenpair of a unit-norm A is an
# approximate eigenpair.  1/5 is the safe admissible value.
C0 = 0.2

_MU_LOWER = 1.0 / np.sqrt(2.0)


@dataclass(frozen=True)
class ApproxEigenpair:
    """Candidate eigenpair (zeta, w) with ||w|| = 1."""

    zeta: complex
    w: np.ndarray

    def __post_init__(self):
        w = as_matrix(self.w, "w").ravel()
        n = np.linalg.norm(w)
        if n == 0.0:
            raise ValueError("w must be nonzero")
        object.__setattr__(self, "w", w / n)
        object.__setattr__(self, "zeta", complex(self.zeta))


@dataclass(frozen=True)
class NewtonStep:
    """Newton increment: lambda_dot, v_dot in w-perp, and its length beta."""

    lambda_dot: complex
    v_dot: np.ndarray
    beta: float


def _check_invertible(A, zeta, w):
    U, M = kernels.frame_matrix(A, w)
    block = kernels.reduced_block(M, zeta)
    smin, smax = kernels.block_singular_range(block)
    if smin <= kernels.RANK_RCOND * smax or smax == 0.0:
        raise IllPosedError("Newton map undefined: singular reduced operator")


def newton_step(A, pair: ApproxEigenpair):
    """One Newton update for the matrix ``A``.

    Returns ``(next_pair, step)``; the updated eigenvector representative is
    renormalized to unit length.
    """
    A = as_matrix(A, "A")
    _check_invertible(A, pair.zeta, pair.w)
    zeta2, w2, lamdot, vdot, beta_val = kernels.newton_core(A, pair.zeta, pair.w)
    return (
        ApproxEigenpair(zeta=zeta2, w=w2),
        NewtonStep(lambda_dot=complex(lamdot), v_dot=vdot, beta=float(beta_val)),
    )


def newton_iterate(A, pair: ApproxEigenpair, k: int) -> ApproxEigenpair:
    """k-fold composition of the Newton map (k = 0 returns the input)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    A = as_matrix(A, "A")
    zeta, w = pair.zeta, pair.w
    for _ in range(int(k)):
        _check_invertible(A, zeta, w)
        zeta, w, _ld, _vd, _b = kernels.newton_core(A, zeta, w)
    return ApproxEigenpair(zeta=zeta, w=w)


def beta(A, pair: ApproxEigenpair) -> float:
    """Length of the Newton step in the tangent space.

    Callers that rely on the beta/distance brackets normalize ``A`` to unit
    Frobenius norm first.
    """
    A = as_matrix(A, "A")
    _check_invertible(A, pair.zeta, pair.w)
    _z, _w, _ld, _vd, beta_val = kernels.newton_core(A, pair.zeta, pair.w)
    return float(beta_val)


def certify_radius(mu_value: float) -> float:
    """dist_A radius around a true eigenpair inside which every pair is an
    approximate eigenpair (for unit-norm matrices)."""
    if not np.isfinite(mu_value) or mu_value < _MU_LOWER - 1e-12:
        raise ValueError("mu_value must be finite and at least 1/sqrt(2)")
    return C0 / float(mu_value)
