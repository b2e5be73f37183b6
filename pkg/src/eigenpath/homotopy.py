"""Certified homotopy continuation: the constant ledger, the step-length
controller, the path-following loop, and the step-count ceiling used by the
verification harness.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import BudgetExceededError, IllPosedError, PathFailureError
from .geometry import great_circle
from .linalg import as_matrix, frobenius_norm
from .newton import ApproxEigenpair

_SQRT3 = np.sqrt(3.0)

DEFAULT_MAX_STEPS = 10**9
_CHUNK = 1 << 16


@dataclass(frozen=True)
class ConstantLedger:
    """The coupled constants of the step controller and its analysis.

    The primitive values (c1', c1, cu', cu, c_*, K) follow the published
    table; c4..c7 are derived in ``__post_init__`` and the constraint
    inequalities they must satisfy are asserted at construction.  ``C = 1/c7``
    is the step-count-ceiling constant and ``R = c7 / (6 (1 + 4 sqrt(3) c4)^2)``
    the guaranteed step-size floor coefficient.
    """

    c1_prime: float = 1e-3
    cu_prime: float = 1e-3
    c_star: float = 1e-4
    K: float = 64.0
    c1: float = field(init=False)
    cu: float = field(init=False)
    c4: float = field(init=False)
    c5: float = field(init=False)
    c6: float = field(init=False)
    c7: float = field(init=False)
    C: float = field(init=False)
    R: float = field(init=False)

    def __post_init__(self):
        c1 = _SQRT3 * self.c1_prime
        cu = _SQRT3 * self.cu_prime + 3.0 * c1**2 * (_SQRT3 - 1.0) / (2.0 * (1.0 - 3.0 * c1))
        g_star = 1.0 + 4.0 * _SQRT3 * self.c_star
        c4 = self.c_star + g_star * (c1 + 2.0 * cu)
        g4 = 1.0 + 4.0 * _SQRT3 * c4
        c5 = self.cu_prime / g_star
        c6 = (c5 * (1.0 - 3.0 * c1) - 2.0 * (1.0 + 3.0 * c1) * self.c_star) / (
            2.0 * (1.0 + 3.0 * c1) * g4
        )
        c7 = min(self.c1_prime / (g4 * g_star), c6)
        object.__setattr__(self, "c1", c1)
        object.__setattr__(self, "cu", cu)
        object.__setattr__(self, "c4", c4)
        object.__setattr__(self, "c5", c5)
        object.__setattr__(self, "c6", c6)
        object.__setattr__(self, "c7", c7)
        object.__setattr__(self, "C", 1.0 / c7)
        object.__setattr__(self, "R", c7 / (6.0 * g4**2))
        self._validate()

    def _validate(self):
        c1, cu, cs, K = self.c1, self.cu, self.c_star, self.K
        g_star = 1.0 + 4.0 * _SQRT3 * cs
        g4 = 1.0 + 4.0 * _SQRT3 * self.c4
        checks = [
            _SQRT3 * self.c1_prime <= c1 < 0.5,
            _SQRT3 * self.cu_prime <= cu - 1.5 * c1**2 * (_SQRT3 - 1.0) / (1.0 - 3.0 * c1) + 1e-18,
            4.0 * _SQRT3 * cs < 1.0,
            4.0 * _SQRT3 * self.c4 < 1.0,
            2.0 * g_star * g4 * cu < K * cs,
            K * cs < 0.2,
            self.c5 > 0.0,
            self.c6 > 0.0,
            self.c7 > 0.0,
            self.c7 <= self.c6 and self.c7 <= self.c1_prime / (g4 * g_star),
        ]
        if not all(checks):
            raise ValueError(f"constant ledger violates its constraints: {checks}")


DEFAULT_LEDGER = ConstantLedger()


@dataclass
class HomotopyTrace:
    """Per-step audit trail of one path-following run."""

    n: int
    steps: int
    s: np.ndarray
    ds: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    beta: np.ndarray
    zeta: np.ndarray
    abs_zeta_pre_rescale: np.ndarray
    reached_end: bool
    final_residual: float = float("nan")
    wall_time_s: float = 0.0
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "steps": self.steps,
            "final_residual": self.final_residual,
            "per_step": [
                {"s": float(self.s[i]), "ds": float(self.ds[i]), "r": float(self.r[i]), "beta": float(self.beta[i])}
                for i in range(self.steps)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def choose_step(B, A_dot, zeta, w, ledger: ConstantLedger = DEFAULT_LEDGER) -> float:
    """Certified step length at ``(B, zeta, w)`` along the unit tangent ``A_dot``.

    ``B`` and ``A_dot`` must have unit Frobenius norm and ``w`` unit length.
    Returns ``min(s', s'')``; guaranteed to be at least ``R / mu^2``.
    """
    B = as_matrix(B, "B")
    A_dot = as_matrix(A_dot, "A_dot")
    w = as_matrix(w, "w").ravel()
    for name, val, target in (("B", frobenius_norm(B), 1.0), ("A_dot", frobenius_norm(A_dot), 1.0), ("w", float(np.linalg.norm(w)), 1.0)):
        if abs(val - target) > 1e-8:
            raise ValueError(f"{name} must have unit norm (got {val!r})")
    ds, _r, _phi, _beta, status = kernels.step_controller(
        B, A_dot, complex(zeta), w, ledger.c1, ledger.cu
    )
    if status == kernels.ILL_POSED:
        raise IllPosedError("step controller: singular reduced operator")
    if status == kernels.NO_PROGRESS:
        raise PathFailureError("step controller: no certified positive step exists")
    return float(ds)


def _empty_trace(n, seed=None):
    z = np.zeros(0)
    return HomotopyTrace(
        n=n, steps=0, s=z, ds=z.copy(), r=z.copy(), phi=z.copy(), beta=z.copy(),
        zeta=np.zeros(0, dtype=np.complex128), abs_zeta_pre_rescale=z.copy(),
        reached_end=False, seed=seed,
    )


def path_follow(
    A,
    A0,
    zeta0,
    w0,
    ledger: ConstantLedger = DEFAULT_LEDGER,
    max_steps: int = DEFAULT_MAX_STEPS,
    seed: int | None = None,
):
    """Follow the eigenpair lifting of the great-circle arc from ``A0`` to ``A``.

    The initial pair is an (approximate) eigenpair of ``A0``; internally both
    endpoints are normalized to the sphere and ``zeta0`` is rescaled by
    ``1/||A0||_F`` accordingly.  On success the returned pair ``(zeta', w')``
    satisfies ``zeta' = ||A||_F * zeta_final`` and is an approximate eigenpair
    of ``A``.

    Returns ``(ApproxEigenpair, HomotopyTrace)``.

    Raises
    ------
    DegenerateArcError
        ``A0`` and ``A`` are real-linearly dependent.
    PathFailureError
        An ill-posed point was hit or the certified step collapsed.
    BudgetExceededError
        ``max_steps`` was exhausted.
    """
    A = as_matrix(A, "A")
    A0 = as_matrix(A0, "A0")
    w = as_matrix(w0, "w0").ravel()
    nw = np.linalg.norm(w)
    if nw == 0.0:
        raise ValueError("w0 must be nonzero")
    w = w / nw
    arc = great_circle(A0, A)
    n = A.shape[0]
    norm_A = frobenius_norm(A)
    zeta = complex(zeta0) / frobenius_norm(A0)

    A0h = np.ascontiguousarray(arc.start)
    W = np.ascontiguousarray(arc.direction)
    alpha = arc.length

    chunks = []
    s = 0.0
    total = 0
    status = kernels.RUNNING
    t0 = time.perf_counter()
    while total < max_steps:
        cap = int(min(_CHUNK, max_steps - total))
        out = {
            name: np.empty(cap, dtype=(np.complex128 if name == "zeta" else np.float64))
            for name in ("s", "ds", "r", "phi", "beta", "zeta", "pre")
        }
        try:
            k, s, zeta, w, status = kernels.path_follow_chunk(
                A0h, W, alpha, s, zeta, w, ledger.c1, ledger.cu, cap,
                out["s"], out["ds"], out["r"], out["phi"], out["beta"],
                out["zeta"], out["pre"],
            )
        except np.linalg.LinAlgError as exc:
            raise PathFailureError(f"singular linear solve during Newton correction: {exc}") from exc
        total += k
        chunks.append({name: arr[:k] for name, arr in out.items()})
        if status != kernels.RUNNING:
            break
    wall = time.perf_counter() - t0

    trace = HomotopyTrace(
        n=n,
        steps=total,
        s=np.concatenate([c["s"] for c in chunks]) if chunks else np.zeros(0),
        ds=np.concatenate([c["ds"] for c in chunks]) if chunks else np.zeros(0),
        r=np.concatenate([c["r"] for c in chunks]) if chunks else np.zeros(0),
        phi=np.concatenate([c["phi"] for c in chunks]) if chunks else np.zeros(0),
        beta=np.concatenate([c["beta"] for c in chunks]) if chunks else np.zeros(0),
        zeta=np.concatenate([c["zeta"] for c in chunks]) if chunks else np.zeros(0, dtype=np.complex128),
        abs_zeta_pre_rescale=np.concatenate([c["pre"] for c in chunks]) if chunks else np.zeros(0),
        reached_end=(status == kernels.DONE),
        wall_time_s=wall,
        seed=seed,
    )
    if status == kernels.ILL_POSED:
        raise PathFailureError("path crossed an ill-posed point (singular reduced operator)")
    if status == kernels.NO_PROGRESS:
        raise PathFailureError("path stalled: certified step size underflowed")
    if status != kernels.DONE:
        raise BudgetExceededError(f"path did not finish within {max_steps} steps")

    result = ApproxEigenpair(zeta=norm_A * zeta, w=w)
    trace.final_residual = float(np.linalg.norm(A @ result.w - result.zeta * result.w) / norm_A)
    return result, trace


# ---------------------------------------------------------------------------
# Step-count ceiling (test/bench utility; oracle-backed)
# ---------------------------------------------------------------------------


def _condition_integrand(arc, sgrid, lams, vecs):
    """Vectorized condition-length integrand over the nodes.

    Uses the full-space projected form (pseudoinverse route, with the left
    eigenvector for lambda-dot), which is independent of the frame-based
    production code.
    """
    n = arc.start.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    out = np.empty(sgrid.size)
    chunk = 4096
    for lo in range(0, sgrid.size, chunk):
        hi = min(lo + chunk, sgrid.size)
        s = sgrid[lo:hi]
        lam = lams[lo:hi]
        V = vecs[lo:hi]
        cs = np.cos(s)[:, None, None]
        sn = np.sin(s)[:, None, None]
        B = arc.start[None] * cs + arc.direction[None] * sn
        Bdot = -arc.start[None] * sn + arc.direction[None] * cs
        P = eye[None] - V[:, :, None] * V.conj()[:, None, :]
        G = P @ (B - lam[:, None, None] * eye[None]) @ P
        sv = np.linalg.svd(G, compute_uv=False)
        mu_vals = 1.0 / sv[:, n - 2]  # ||B||_F = 1 on the arc
        Gdag = np.linalg.pinv(G, rcond=1e-13)
        u = V - np.einsum("mji,mj->mi", Gdag.conj(), np.einsum("mji,mj->mi", B.conj(), V))
        Bv = np.einsum("mij,mj->mi", Bdot, V)
        lamdot = np.einsum("mi,mi->m", u.conj(), Bv)  # <Bdot v, u>; <v, u> = 1
        vdot = -np.einsum("mij,mj->mi", Gdag, Bv)
        speed = np.sqrt(
            1.0 + np.abs(lamdot) ** 2 + np.sum(np.abs(vdot) ** 2, axis=1)
        )
        out[lo:hi] = mu_vals * speed
    return out


def condition_length_profile(A, A0, zeta0, w0, sgrid):
    """Condition-length integrand mu * ||(Bdot, lamdot, vdot)|| at the given
    arc parameters, along the oracle-continued lifting.

    Returns ``(sgrid, integrand, lifted_pairs)``.
    """
    from . import oracle  # deferred to avoid a module cycle

    A = as_matrix(A, "A")
    A0 = as_matrix(A0, "A0")
    arc = great_circle(A0, A)
    sgrid = np.asarray(sgrid, dtype=np.float64)
    start_lam = complex(zeta0) / frobenius_norm(A0)
    lifted = oracle.continue_path_at(arc, start_lam, w0, sgrid)
    lams = np.array([p[0] for p in lifted], dtype=np.complex128)
    vecs = np.array([p[1] for p in lifted], dtype=np.complex128)
    integrand = _condition_integrand(arc, sgrid, lams, vecs)
    return sgrid, integrand, lifted


def interval_condition_lengths(A, A0, zeta0, w0, trace: HomotopyTrace, subdivisions: int = 4):
    """Condition length of the lifted path over each accepted step interval.

    ``lengths[i]`` integrates the condition metric over ``[s_{i-1}, s_i]``;
    ``truncated[i]`` marks steps whose chosen advance was capped at the arc
    end (their interval is shorter than the certified one).
    """
    bounds = np.concatenate(([0.0], trace.s))
    parts = [np.array([0.0])]
    boundary_idx = [0]
    count = 0
    for i in range(trace.steps):
        seg = np.linspace(bounds[i], bounds[i + 1], subdivisions + 1)[1:]
        parts.append(seg)
        count += subdivisions
        boundary_idx.append(count)
    grid = np.concatenate(parts)
    _s, f, _lifted = condition_length_profile(A, A0, zeta0, w0, grid)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(grid))))
    idx = np.asarray(boundary_idx)
    lengths = cum[idx[1:]] - cum[idx[:-1]]
    advance = trace.s - bounds[:-1]
    truncated = trace.ds > advance * (1.0 + 1e-12)
    return lengths, truncated


def step_count_ceiling(
    A, A0, zeta0, w0, quadrature_points: int, ledger: ConstantLedger = DEFAULT_LEDGER
) -> float:
    """Ceiling ``K = C * integral of mu ||(Bdot, lamdot, vdot)|| ds`` along the
    lifted arc, by trapezoid quadrature at the given resolution.

    Raises :class:`SigmaCrossingError` if the oracle continuation detects an
    eigenvalue collision on the arc.
    """
    if quadrature_points < 2:
        raise ValueError("quadrature_points must be at least 2")
    arc = great_circle(A0, A)
    sgrid = np.linspace(0.0, arc.length, int(quadrature_points))
    _s, integrand, _lifted = condition_length_profile(A, A0, zeta0, w0, sgrid)
    return float(ledger.C * np.trapezoid(integrand, sgrid))
