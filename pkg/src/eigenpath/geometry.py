"""Metric structure: projective distance, product distances, great-circle arcs.

Projective points are represented by nonzero vectors; every operation
normalizes internally, so representatives may carry any scale and phase.
The matrix sphere is the *real* unit sphere of C^{n x n} under the real part
of the Frobenius product, hence arc angles use ``Re <.,.>_F`` and no complex
phase alignment is performed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateArcError
from .linalg import as_matrix, frobenius_norm

_DEGENERACY_TOL = 1e-12


def proj_distance(v, w) -> float:
    """Fubini-Study (angular) distance between projective classes, in [0, pi/2]."""
    v = as_matrix(v, "v").ravel()
    w = as_matrix(w, "w").ravel()
    nv = np.linalg.norm(v)
    nw = np.linalg.norm(w)
    if nv == 0.0 or nw == 0.0:
        raise ValueError("projective distance is undefined for the zero vector")
    c = np.abs(np.vdot(v, w)) / (nv * nw)
    return float(np.arccos(min(1.0, c)))


def triple_distance(p, q) -> float:
    """Distance between solution-variety points (A, lambda, v)."""
    A, lam, v = p
    A2, lam2, v2 = q
    dA = frobenius_norm(np.asarray(A) - np.asarray(A2))
    dp = proj_distance(v, v2)
    return float(np.sqrt(dA**2 + abs(complex(lam) - complex(lam2)) ** 2 + dp**2))


def dist_A(A, p, q) -> float:
    """Eigenpair distance relative to ``A``: |dlambda|^2/||A||_F^2 + d_P^2, rooted."""
    nA = frobenius_norm(A)
    if nA == 0.0:
        raise ValueError("dist_A is undefined for the zero matrix")
    lam, v = p
    lam2, v2 = q
    dp = proj_distance(v, v2)
    return float(np.sqrt((abs(complex(lam) - complex(lam2)) / nA) ** 2 + dp**2))


@dataclass(frozen=True)
class GreatCircleArc:
    """Arc-length parametrized portion of a great circle on the matrix sphere.

    ``point_at(0)`` is the normalized start, ``point_at(length)`` the
    normalized end; ``direction`` is the unit tangent at the start,
    Re-orthogonal to it.
    """

    start: np.ndarray
    direction: np.ndarray
    length: float

    def point_at(self, s: float) -> np.ndarray:
        return self.start * np.cos(s) + self.direction * np.sin(s)

    def tangent_at(self, s: float) -> np.ndarray:
        return -self.start * np.sin(s) + self.direction * np.cos(s)


def great_circle(A0, A1) -> GreatCircleArc:
    """Great-circle arc joining ``A0/||A0||`` to ``A1/||A1||``.

    Raises :class:`DegenerateArcError` when the endpoints are real-linearly
    dependent (angle 0 or pi at tolerance 1e-12).
    """
    A0 = as_matrix(A0, "A0")
    A1 = as_matrix(A1, "A1")
    n0 = frobenius_norm(A0)
    n1 = frobenius_norm(A1)
    if n0 == 0.0 or n1 == 0.0:
        raise ValueError("arc endpoints must be nonzero")
    B0 = A0 / n0
    B1 = A1 / n1
    c = float(np.real(np.vdot(B0, B1)))
    c = max(-1.0, min(1.0, c))
    alpha = float(np.arccos(c))
    raw = B1 - B0 * c
    nraw = frobenius_norm(raw)  # equals sin(alpha) up to roundoff
    if nraw <= _DEGENERACY_TOL or np.sin(alpha) <= _DEGENERACY_TOL or alpha >= np.pi - _DEGENERACY_TOL:
        raise DegenerateArcError(
            "endpoint matrices are real-linearly dependent (angle %.3e)" % alpha
        )
    direction = raw / nraw
    return GreatCircleArc(start=B0, direction=direction, length=alpha)
