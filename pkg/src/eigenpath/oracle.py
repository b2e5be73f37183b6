"""Independent reference eigensolver and path continuation.

This is the brute-force ground truth used by the tests and the bench
harness: eigenvalues come from Aberth-Ehrlich iteration on the
characteristic polynomial (coefficients via the Hessenberg determinant
recurrence), eigenvectors from shifted inverse iteration.  None of the
Newton/homotopy production code is involved.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .conditioning import SIGMA_GAP_RTOL, EigenTriple
from .errors import OracleFailureError, SigmaCrossingError
from .geometry import GreatCircleArc, proj_distance
from .linalg import as_matrix, frobenius_norm

ABERTH_MAX_SWEEPS = 500
ABERTH_TOL = 1e-13
ORACLE_MAX_N = 64
_RESIDUAL_RTOL = 1e-9
_INVIT_ROUNDS = 4


def _charpoly_roots(A) -> np.ndarray:
    """Eigenvalues of ``A`` (any order) via Hessenberg + Aberth on ``A/||A||``."""
    n = A.shape[0]
    scale = frobenius_norm(A)
    if scale == 0.0:
        return np.zeros(n, dtype=np.complex128)
    H = kernels.hessenberg_form(np.ascontiguousarray(A / scale))
    coeffs = kernels.charpoly_hessenberg(H)
    z = kernels.aberth_initial(coeffs)
    _sweeps, converged = kernels.aberth_sweeps(coeffs, z, ABERTH_MAX_SWEEPS, ABERTH_TOL)
    if not converged:
        raise OracleFailureError(f"Aberth iteration did not converge within {ABERTH_MAX_SWEEPS} sweeps")
    return scale * z


def reference_eigenpairs(A) -> list[EigenTriple]:
    """All ``n`` eigenpairs of ``A``, deterministically ordered by
    (Re lambda, Im lambda), with residuals at most ``1e-9 ||A||_F``."""
    A = as_matrix(A, "A")
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("A must be square")
    n = A.shape[0]
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle supports n <= {ORACLE_MAX_N}")
    scale = frobenius_norm(A)
    if scale == 0.0:
        eye = np.eye(n, dtype=np.complex128)
        return [EigenTriple.build(A, 0.0, eye[:, j]) for j in range(n)]
    lams = _charpoly_roots(A)
    order = np.lexsort((lams.imag, lams.real))
    triples = []
    for idx in order:
        v, lam_polished, resid = kernels.inverse_iteration(
            A, lams[idx], _INVIT_ROUNDS, 1e-12 * scale
        )
        if resid > _RESIDUAL_RTOL * scale:
            raise OracleFailureError(
                f"inverse iteration residual {resid:.3e} exceeds {_RESIDUAL_RTOL:.0e} * ||A||_F"
            )
        triples.append(EigenTriple.build(A, lam_polished, v))
    return triples


def eigenvalue_min_gap(triples) -> float:
    """Smallest pairwise eigenvalue distance (inf for n = 1)."""
    lams = np.array([t.eigenvalue for t in triples])
    if lams.size < 2:
        return float("inf")
    diff = np.abs(lams[:, None] - lams[None, :])
    diff[np.diag_indices(lams.size)] = np.inf
    return float(diff.min())


def is_sigma_near(A, triples=None) -> bool:
    """True when two eigenvalues collide at the oracle gap tolerance."""
    A = as_matrix(A, "A")
    if triples is None:
        triples = reference_eigenpairs(A)
    return eigenvalue_min_gap(triples) < SIGMA_GAP_RTOL * frobenius_norm(A)


# A tracked-branch gap below this absolute level (the arc lives on the unit
# sphere, so eigenvalues are O(1)) is suspicious enough to warrant refining
# the gap minimum between the surrounding nodes.
_GAP_SUSPECT = 1e-3
_CROSSING_TOL = 10.0 * SIGMA_GAP_RTOL


def _refined_gap_minimum(A0h, W, s_lo, s_hi, lam_lo, lam_hi, warm):
    """Golden-section minimization of the tracked-branch eigenvalue gap over
    ``[s_lo, s_hi]``; the tracked root at an interior point is identified as
    the one nearest the linear interpolation of the branch eigenvalue."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    span = max(s_hi - s_lo, 1e-300)

    def gap(s):
        z, conv = kernels.eig_point(A0h, W, s, warm, ABERTH_MAX_SWEEPS, ABERTH_TOL)
        if not conv:
            raise OracleFailureError(f"Aberth refinement failed at s={s:.6f}")
        t = (s - s_lo) / span
        pred = (1.0 - t) * lam_lo + t * lam_hi
        m = int(np.argmin(np.abs(z - pred)))
        others = np.abs(z - z[m])
        others[m] = np.inf
        return float(others.min())

    a, b = float(s_lo), float(s_hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = gap(c), gap(d)
    best = min(gc, gd)
    for _ in range(90):
        if gc < gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = gap(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = gap(d)
        best = min(best, gc, gd)
        if b - a < 1e-14 or best < _CROSSING_TOL:
            break
    return best


def continue_path_at(arc: GreatCircleArc, start_lam, start_vec, sgrid):
    """Lift the arc through the eigenpair branch starting at ``(start_lam,
    start_vec)`` and return ``[(lambda_s, v_s)]`` at the given parameters.

    Eigenvalues are tracked by warm-started Aberth across nodes; the branch is
    matched node-to-node by minimal dist_A over the nearest eigenvalue
    candidates.  When the tracked eigenvalue approaches another one, the gap
    minimum between nodes is located by golden-section refinement; a minimum
    below ``10 x`` the separation tolerance raises
    :class:`SigmaCrossingError` with the bracketing parameter interval.
    """
    sgrid = np.asarray(sgrid, dtype=np.float64)
    if sgrid.size == 0:
        return []
    A0h = np.ascontiguousarray(arc.start)
    W = np.ascontiguousarray(arc.direction)
    lams, fail = kernels.arc_lambda_nodes(A0h, W, sgrid, ABERTH_MAX_SWEEPS, ABERTH_TOL)
    if fail >= 0:
        raise OracleFailureError(f"Aberth continuation failed at node {fail} (s={sgrid[fail]:.6f})")

    start_lam = complex(start_lam)
    v_prev = as_matrix(start_vec, "start_vec").ravel()
    v_prev = v_prev / np.linalg.norm(v_prev)
    lam_prev = start_lam

    if sgrid[0] == 0.0:
        first_gap = np.abs(lams[0] - start_lam).min()
        if first_gap > 1e-6:
            raise ValueError(
                "start pair is not an eigenpair of the arc start "
                f"(nearest root at distance {first_gap:.3e})"
            )

    def crossing(lo, hi):
        raise SigmaCrossingError(
            f"eigenvalue collision near s in [{lo:.6f}, {hi:.6f}]",
            interval=(float(lo), float(hi)),
        )

    out = []
    gaps = np.empty(sgrid.size)
    tracked = []
    for j, s in enumerate(sgrid):
        B = arc.point_at(s)
        dl = np.abs(lams[j] - lam_prev)
        order = np.argsort(dl)
        candidates = [order[0]]
        if dl.size > 1 and dl[order[1]] <= 10.0 * max(dl[order[0]], 1e-300):
            candidates.append(order[1])
        best = None
        for idx in candidates:
            v, lam_polished, _resid = kernels.inverse_iteration(
                np.ascontiguousarray(B), lams[j, idx], _INVIT_ROUNDS, 1e-12
            )
            d = np.sqrt(abs(lam_polished - lam_prev) ** 2 + proj_distance(v, v_prev) ** 2)
            if best is None or d < best[0]:
                best = (d, idx, lam_polished, v)
        _d, idx, lam_cur, v_cur = best
        others = np.abs(lams[j] - lams[j, idx])
        others[idx] = np.inf
        gaps[j] = float(others.min())
        tracked.append(complex(lam_cur))
        if gaps[j] < _CROSSING_TOL:
            crossing(sgrid[j - 1] if j > 0 else s, s)
        # Refine around an interior local minimum of the gap when the dip is
        # either small in absolute terms or small relative to the per-node
        # variation (a transversal collision between nodes shows up as a dip
        # comparable to the local slope times the node spacing).
        if j >= 2 and gaps[j - 1] <= gaps[j - 2] and gaps[j - 1] <= gaps[j]:
            delta = max(abs(gaps[j - 1] - gaps[j - 2]), abs(gaps[j] - gaps[j - 1]))
            if gaps[j - 1] <= max(_GAP_SUSPECT, 3.0 * delta):
                refined = _refined_gap_minimum(
                    A0h, W, sgrid[j - 2], sgrid[j], tracked[j - 2], tracked[j], lams[j - 1].copy()
                )
                if refined < _CROSSING_TOL:
                    crossing(sgrid[j - 2], sgrid[j])
        out.append((complex(lam_cur), v_cur))
        lam_prev, v_prev = lam_cur, v_cur
    # trailing suspect at the last node
    if sgrid.size >= 2 and gaps[-1] <= gaps[-2]:
        delta = abs(gaps[-1] - gaps[-2])
        if gaps[-1] <= max(_GAP_SUSPECT, 3.0 * delta):
            refined = _refined_gap_minimum(
                A0h, W, sgrid[-2], sgrid[-1], tracked[-2], tracked[-1], lams[-1].copy()
            )
            if refined < _CROSSING_TOL:
                crossing(sgrid[-2], sgrid[-1])
    return out


def continue_path(arc: GreatCircleArc, start: EigenTriple, samples: int) -> list[EigenTriple]:
    """Dense sampling of the lifted path with origin ``start``.

    ``start`` must be an eigenpair of ``arc.point_at(0)``.  Returns one
    :class:`EigenTriple` per sample, on a uniform parameter grid.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    sgrid = np.linspace(0.0, arc.length, int(samples))
    pairs = continue_path_at(arc, start.eigenvalue, start.eigenvector, sgrid)
    return [
        EigenTriple.build(arc.point_at(s), lam, v) for s, (lam, v) in zip(sgrid, pairs)
    ]
