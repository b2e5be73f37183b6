"""Relative-error refinement: turn a certified approximate eigenpair into an
epsilon-forward approximation in relative error by repeated Newton steps."""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import NonconvergenceError
from .linalg import as_matrix, frobenius_norm
from .newton import ApproxEigenpair

# 2^(2^64) dwarfs any double-precision accuracy scale; hitting this cap means
# the stopping predicate cannot fire, which happens exactly when the
# associated eigenvalue is (numerically) zero.
MAX_REFINE_ITERATIONS = 64


def relative_error_refine(A, pair: ApproxEigenpair, epsilon: float, max_iterations: int = MAX_REFINE_ITERATIONS) -> ApproxEigenpair:
    """Newton-iterate until ``k >= log2 log2 (4 / (epsilon |zeta'|))``.

    ``A`` must have unit Frobenius norm and ``pair`` must be an approximate
    eigenpair of it (the path-following postcondition).  The result satisfies
    ``d_P(w', v) <= epsilon`` and ``|zeta' - lambda| <= epsilon |lambda|`` for
    the associated true eigenpair, provided ``lambda != 0``.

    Raises
    ------
    NonconvergenceError
        The iteration cap fired without the stopping predicate holding
        (associated eigenvalue at or near zero).
    """
    pair, _iterations = refine_with_count(A, pair, epsilon, max_iterations)
    return pair


def refine_with_count(A, pair: ApproxEigenpair, epsilon: float, max_iterations: int = MAX_REFINE_ITERATIONS):
    """As :func:`relative_error_refine`, additionally returning the number of
    Newton iterations performed."""
    if not (0.0 < epsilon < 0.5):
        raise ValueError("epsilon must lie in (0, 1/2)")
    A = as_matrix(A, "A")
    if abs(frobenius_norm(A) - 1.0) > 1e-8:
        raise ValueError("A must have unit Frobenius norm")
    zeta, w = pair.zeta, pair.w
    k = 0
    while True:
        zeta, w, _ld, _vd, _b = kernels.newton_core(A, zeta, w)
        k += 1
        azeta = abs(zeta)
        if azeta > 0.0:
            x = 4.0 / (epsilon * azeta)
            if x <= 2.0 or k >= math.log2(math.log2(x)):
                return ApproxEigenpair(zeta=zeta, w=w), k
        if k >= max_iterations:
            raise NonconvergenceError(
                "refinement did not reach its stopping predicate; the associated eigenvalue is (numerically) zero"
            )


def refine_iterations_bound(A, epsilon: float) -> float:
    """The a-priori iteration bound log2 log2 (8 ||A^{-1}|| / epsilon)."""
    A = as_matrix(A, "A")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return math.log2(math.log2(8.0 / (float(s[-1]) * epsilon)))
