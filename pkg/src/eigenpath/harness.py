"""Global solve drivers, reproducible Monte-Carlo experiments, matrix I/O,
and statistics reporting for the CLI."""

from __future__ import annotations

import json
import math
import struct
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .conditioning import EigenTriple, mu, mu_F_av
from .errors import EigenpathError, IllPosedError
from .geometry import dist_A
from .homotopy import (
    DEFAULT_LEDGER,
    DEFAULT_MAX_STEPS,
    ConstantLedger,
    HomotopyTrace,
    interval_condition_lengths,
    path_follow,
    step_count_ceiling,
)
from .initial_triples import hex_diagonal, psi, sample_omega, single_start
from .linalg import (
    as_matrix,
    frobenius_norm,
    sample_gaussian_matrix,
    sample_truncated_gaussian,
)
from .newton import C0, ApproxEigenpair, beta as newton_beta
from .refine import relative_error_refine
from .rng import RngStream

# ---------------------------------------------------------------------------
# Matrix I/O: inline JSON (row-major complex pairs) and the EIGP binary format
# (8-byte header: magic "EIGP" + u32 little-endian n, then n^2 complex doubles,
# 16 bytes little-endian each, row-major).
# ---------------------------------------------------------------------------

MAGIC = b"EIGP"


def matrix_to_json_obj(A) -> dict:
    A = as_matrix(A, "A")
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in A.ravel()],
    }


def matrix_from_json_obj(obj) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    entries = obj["entries"]
    if len(entries) != rows * cols:
        raise ValueError("entry count does not match rows * cols")
    flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return flat.reshape(rows, cols)


def save_matrix_json(path, A) -> None:
    Path(path).write_text(json.dumps(matrix_to_json_obj(A)))


def save_matrix_binary(path, A) -> None:
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise ValueError("binary format stores square matrices only")
    n = A.shape[0]
    buf = bytearray()
    buf += MAGIC
    buf += struct.pack("<I", n)
    flat = np.ascontiguousarray(A).ravel()
    buf += flat.astype("<c16").tobytes()
    Path(path).write_bytes(bytes(buf))


def load_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] == MAGIC:
        (n,) = struct.unpack("<I", raw[4:8])
        need = 8 + 16 * n * n
        if len(raw) < need:
            raise ValueError("truncated binary matrix file")
        flat = np.frombuffer(raw[8:need], dtype="<c16")
        return flat.reshape(n, n).astype(np.complex128)
    return matrix_from_json_obj(json.loads(raw.decode("utf-8")))


# ---------------------------------------------------------------------------
# Solve drivers
# ---------------------------------------------------------------------------


@dataclass
class SolveResult:
    zeta: complex
    w: np.ndarray
    steps: int
    residual: float
    certified: bool
    trace: HomotopyTrace
    start: EigenTriple | None = None
    proposals_used: int = 0

    def to_dict(self) -> dict:
        d = {
            "zeta": [self.zeta.real, self.zeta.imag],
            "w": [[z.real, z.imag] for z in self.w],
            "steps": self.steps,
            "residual": self.residual,
            "certified": self.certified,
        }
        if self.proposals_used:
            d["proposals_used"] = self.proposals_used
        return d


def certified_witness(A, zeta, w, ledger: ConstantLedger = DEFAULT_LEDGER) -> bool:
    """A-posteriori certificate that ``(zeta, w)`` sits in the invariant
    neighborhood: ``mu * 2 beta <= K c_*`` at the normalized pair.

    This is the bound the path loop re-establishes after every step; a pair
    within it is an approximate eigenpair with a large safety margin
    (``K c_* < 1/5``).
    """
    A = as_matrix(A, "A")
    nA = frobenius_norm(A)
    zhat = complex(zeta) / nA
    try:
        pair = ApproxEigenpair(zeta=zhat, w=w)
        b = newton_beta(A / nA, pair)
        m = mu(A / nA, zhat, pair.w)
    except (IllPosedError, ValueError):
        return False
    return bool(np.isfinite(m) and 2.0 * b * m <= ledger.K * ledger.c_star)


def solve_one(A, ledger: ConstantLedger = DEFAULT_LEDGER, max_steps: int = DEFAULT_MAX_STEPS) -> SolveResult:
    """Single eigenpair: follow the path from the rank-one diagonal start."""
    A = as_matrix(A, "A")
    start = single_start(A.shape[0])
    pair, trace = path_follow(
        A, start.matrix, start.eigenvalue, start.eigenvector, ledger=ledger, max_steps=max_steps
    )
    return SolveResult(
        zeta=pair.zeta,
        w=pair.w,
        steps=trace.steps,
        residual=trace.final_residual,
        certified=certified_witness(A, pair.zeta, pair.w, ledger),
        trace=trace,
        start=start,
    )


@dataclass
class AllEigenpairsResult:
    results: list  # SolveResult per index, or None on failure
    errors: dict  # index -> error kind string
    pairwise_distinct: bool

    @property
    def n_failed(self) -> int:
        return len(self.errors)


def solve_all(A, ledger: ConstantLedger = DEFAULT_LEDGER, max_steps: int = DEFAULT_MAX_STEPS) -> AllEigenpairsResult:
    """All eigenpairs: n paths from the hexagonal-lattice diagonal start.

    Per-index failures are recorded and the remaining pairs returned.  The
    postcondition check verifies that returned pairs are pairwise distinct:
    their mutual dist_A must exceed the sum of the certification radii.
    """
    A = as_matrix(A, "A")
    n = A.shape[0]
    D, triples = hex_diagonal(n)
    results: list[SolveResult | None] = []
    errors: dict[int, str] = {}
    for j in range(n):
        t = triples[j]
        try:
            pair, trace = path_follow(A, D, t.eigenvalue, t.eigenvector, ledger=ledger, max_steps=max_steps)
            results.append(
                SolveResult(
                    zeta=pair.zeta,
                    w=pair.w,
                    steps=trace.steps,
                    residual=trace.final_residual,
                    certified=certified_witness(A, pair.zeta, pair.w, ledger),
                    trace=trace,
                    start=t,
                )
            )
        except EigenpathError as exc:
            results.append(None)
            errors[j] = type(exc).__name__
    ok = [r for r in results if r is not None]
    nA = frobenius_norm(A)
    distinct = True
    for i in range(len(ok)):
        for j in range(i + 1, len(ok)):
            ri = C0 / mu(A / nA, ok[i].zeta / nA, ok[i].w)
            rj = C0 / mu(A / nA, ok[j].zeta / nA, ok[j].w)
            d = dist_A(A, (ok[i].zeta, ok[i].w), (ok[j].zeta, ok[j].w))
            if d <= ri + rj:
                distinct = False
    return AllEigenpairsResult(results=results, errors=errors, pairwise_distinct=distinct)


def solve_random(A, rng: RngStream, ledger: ConstantLedger = DEFAULT_LEDGER, max_steps: int = DEFAULT_MAX_STEPS) -> SolveResult:
    """Single eigenpair from the rejection-sampled random start triple."""
    A = as_matrix(A, "A")
    sample, proposals = sample_omega(rng, A.shape[0])
    start = psi(sample)
    pair, trace = path_follow(
        A, start.matrix, start.eigenvalue, start.eigenvector, ledger=ledger, max_steps=max_steps
    )
    return SolveResult(
        zeta=pair.zeta,
        w=pair.w,
        steps=trace.steps,
        residual=trace.final_residual,
        certified=certified_witness(A, pair.zeta, pair.w, ledger),
        trace=trace,
        start=start,
        proposals_used=proposals,
    )


def refine_pair(A, zeta, w, epsilon: float):
    """Refine ``(zeta, w)`` to a relative-error forward approximation of the
    associated eigenpair of ``A`` (any scale; the matrix is normalized
    internally and zeta rescaled on output)."""
    A = as_matrix(A, "A")
    nA = frobenius_norm(A)
    refined = relative_error_refine(A / nA, ApproxEigenpair(zeta=complex(zeta) / nA, w=w), epsilon)
    return nA * refined.zeta, refined.w


def nearest_oracle_pair(A, zeta, w, triples=None):
    """The oracle eigenpair minimizing dist_A to ``(zeta, w)``."""
    A = as_matrix(A, "A")
    if triples is None:
        triples = oracle.reference_eigenpairs(A)
    best = min(triples, key=lambda t: dist_A(A, (zeta, w), (t.eigenvalue, t.eigenvector)))
    return best


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def median_of_means(values, buckets: int = 10) -> float:
    """Median of bucket means (robust location estimate for heavy tails)."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < buckets:
        return float(np.median(x))
    cut = (x.size // buckets) * buckets
    means = x[:cut].reshape(buckets, -1).mean(axis=1)
    return float(np.median(means))


def _summary(values, with_mom: bool = False) -> dict:
    x = np.asarray(values, dtype=np.float64)
    out = {
        "mean": float(x.mean()) if x.size else float("nan"),
        "stderr": float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else float("nan"),
        "min": float(x.min()) if x.size else float("nan"),
        "max": float(x.max()) if x.size else float("nan"),
        "count": int(x.size),
    }
    if with_mom:
        out["median_of_means"] = median_of_means(x)
    return out


def _build_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5, cwd=Path(__file__).parent,
        )
        if out.returncode == 0:
            return out.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return "unreleased"


@dataclass
class StatsReport:
    metrics: dict
    config: dict
    wall_time_s: float
    failures: int = 0
    build: str = field(default_factory=_build_describe)

    def to_dict(self) -> dict:
        return {
            "metrics": self.metrics,
            "config": self.config,
            "wall_time_s": self.wall_time_s,
            "failures": self.failures,
            "build": self.build,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass
class ExperimentConfig:
    experiment: str
    n: object = 6  # int, or list of ints for experiment e
    trials: int = 1000
    seed: int = 0
    sigma: float = 1.0
    center: np.ndarray | None = None
    epsilon: float = 1e-6
    jobs: int = 1
    quadrature_points: int = 10_000
    ledger: ConstantLedger = field(default_factory=lambda: DEFAULT_LEDGER)

    def echo(self) -> dict:
        return {
            "experiment": self.experiment,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "sigma": self.sigma,
            "center": "file" if self.center is not None else "zero",
            "epsilon": self.epsilon,
            "jobs": self.jobs,
            "quadrature_points": self.quadrature_points,
        }


def _run_trials(cfg: ExperimentConfig, one_trial):
    """Run ``one_trial(trial_index) -> dict`` over all trials, in parallel if
    requested; the merge is ordered by trial index so output is identical for
    any job count.  Failed trials are excluded and counted."""
    rows = [None] * cfg.trials
    failures = 0
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            for t, res in enumerate(pool.map(one_trial, range(cfg.trials))):
                rows[t] = res
    else:
        for t in range(cfg.trials):
            rows[t] = one_trial(t)
    kept = []
    for t, row in enumerate(rows):
        if row is None or row.get("_failed"):
            failures += 1
        else:
            kept.append({"trial": t, **row})
    return kept, failures


# --- experiment bodies ------------------------------------------------------


def _experiment_a(cfg: ExperimentConfig):
    """Mean-square Frobenius condition moments for Gaussian, truncated
    Gaussian, and sphere-uniform inputs."""
    n = int(cfg.n)

    def one_trial(t):
        rng = RngStream(cfg.seed, t)
        try:
            A = sample_gaussian_matrix(rng, n, n, center=cfg.center, sigma=cfg.sigma)
            g = mu_F_av(A) ** 2 / frobenius_norm(A) ** 2
            At = sample_truncated_gaussian(rng, n, center=cfg.center, sigma=cfg.sigma)
            tr = mu_F_av(At) ** 2 / frobenius_norm(At) ** 2
            As = sample_gaussian_matrix(rng, n, n)
            As = As / frobenius_norm(As)
            sp = mu_F_av(As) ** 2
            return {"mu2_rel_gaussian": g, "mu2_rel_truncated": tr, "mu2_sphere": sp}
        except EigenpathError:
            return {"_failed": True}

    rows, failures = _run_trials(cfg, one_trial)
    metrics = {
        key: _summary([r[key] for r in rows], with_mom=True)
        for key in ("mu2_rel_gaussian", "mu2_rel_truncated", "mu2_sphere")
    }
    return rows, metrics, failures


def _experiment_b(cfg: ExperimentConfig):
    """Determinant moments: |det G|^2 and ||G^{-1}||_F^2 |det G|^2."""
    m = int(cfg.n)
    G = np.empty((cfg.trials, m, m), dtype=np.complex128)
    for t in range(cfg.trials):
        G[t] = sample_gaussian_matrix(RngStream(cfg.seed, t), m, m, sigma=cfg.sigma)
    det2 = np.abs(np.linalg.det(G)) ** 2
    inv = np.linalg.inv(G)
    weighted = np.sum(np.abs(inv) ** 2, axis=(1, 2)) * det2
    rows = [
        {"trial": t, "det2": float(det2[t]), "weighted_inv_det2": float(weighted[t])}
        for t in range(cfg.trials)
    ]
    metrics = {
        "det2": _summary(det2),
        "weighted_inv_det2": _summary(weighted),
    }
    return rows, metrics, 0


def _experiment_c(cfg: ExperimentConfig):
    """Pseudoinverse moment ||M^dagger||_F^2 for (n-1) x n Gaussian M."""
    n = int(cfg.n)
    vals = np.empty(cfg.trials)
    for t in range(cfg.trials):
        M = sample_gaussian_matrix(RngStream(cfg.seed, t), n - 1, n, sigma=cfg.sigma)
        s = np.linalg.svd(M, compute_uv=False)
        vals[t] = float(np.sum(1.0 / s**2))
    rows = [{"trial": t, "pinv_f2": float(vals[t])} for t in range(cfg.trials)]
    metrics = {"pinv_f2": _summary(vals, with_mom=True)}
    return rows, metrics, 0


def _experiment_d(cfg: ExperimentConfig):
    """Rejection-sampler acceptance: proposals per accepted sample."""
    n = int(cfg.n)

    def one_trial(t):
        _sample, proposals = sample_omega(RngStream(cfg.seed, t), n)
        return {"proposals": float(proposals)}

    rows, failures = _run_trials(cfg, one_trial)
    metrics = {"proposals": _summary([r["proposals"] for r in rows])}
    return rows, metrics, failures


def _experiment_e(cfg: ExperimentConfig):
    """Step-count scaling of the three global algorithms over a list of n."""
    ns = cfg.n if isinstance(cfg.n, (list, tuple)) else [int(cfg.n)]
    rows = []
    metrics = {}
    failures = 0
    for n in ns:
        for mode in ("single", "all", "random"):
            steps_list = []
            for t in range(cfg.trials):
                rng = RngStream(cfg.seed, t)
                A = sample_gaussian_matrix(rng, n, n, sigma=cfg.sigma)
                try:
                    t0 = time.perf_counter()
                    if mode == "single":
                        steps = solve_one(A, ledger=cfg.ledger).steps
                    elif mode == "random":
                        steps = solve_random(A, rng, ledger=cfg.ledger).steps
                    else:
                        res = solve_all(A, ledger=cfg.ledger)
                        if res.n_failed:
                            raise IllPosedError("one or more paths failed")
                        steps = sum(r.steps for r in res.results)
                    wall = time.perf_counter() - t0
                except EigenpathError:
                    failures += 1
                    continue
                steps_list.append(steps)
                rows.append({"trial": t, "n": n, "mode": mode, "steps": steps, "wall_s": wall})
            metrics[f"steps_n{n}_{mode}"] = _summary(steps_list)
    return rows, metrics, failures


def _experiment_f(cfg: ExperimentConfig):
    """Step-ceiling audit: observed steps vs ceil(K), and per-interval
    condition lengths against the c7 floor."""
    n = int(cfg.n)
    rows = []
    metrics_steps, metrics_K, metrics_min_len = [], [], []
    failures = 0
    for t in range(cfg.trials):
        rng = RngStream(cfg.seed, t)
        A = sample_gaussian_matrix(rng, n, n, sigma=cfg.sigma)
        start = single_start(n)
        try:
            res = solve_one(A, ledger=cfg.ledger)
            K = step_count_ceiling(
                A, start.matrix, start.eigenvalue, start.eigenvector,
                cfg.quadrature_points, ledger=cfg.ledger,
            )
            lengths, truncated = interval_condition_lengths(
                A, start.matrix, start.eigenvalue, start.eigenvector, res.trace
            )
        except EigenpathError:
            failures += 1
            continue
        full = lengths[~truncated]
        min_len = float(full.min()) if full.size else float("nan")
        within = res.steps <= math.ceil(K)
        rows.append(
            {
                "trial": t,
                "steps": res.steps,
                "K": K,
                "ceil_K": math.ceil(K),
                "within_ceiling": int(within),
                "min_interval_condlen": min_len,
            }
        )
        metrics_steps.append(res.steps)
        metrics_K.append(K)
        metrics_min_len.append(min_len)
    metrics = {
        "steps": _summary(metrics_steps),
        "K": _summary(metrics_K),
        "min_interval_condlen": _summary(metrics_min_len),
    }
    return rows, metrics, failures


_EXPERIMENTS = {
    "a": _experiment_a,
    "b": _experiment_b,
    "c": _experiment_c,
    "d": _experiment_d,
    "e": _experiment_e,
    "f": _experiment_f,
}


def run_experiment(cfg: ExperimentConfig):
    """Run one experiment family; returns ``(rows, StatsReport)``."""
    if cfg.experiment not in _EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r} (expected one of a..f)")
    if cfg.trials < 1:
        raise ValueError("trials must be at least 1")
    t0 = time.perf_counter()
    rows, metrics, failures = _EXPERIMENTS[cfg.experiment](cfg)
    report = StatsReport(
        metrics=metrics,
        config=cfg.echo(),
        wall_time_s=time.perf_counter() - t0,
        failures=failures,
    )
    return rows, report


def rows_to_csv(rows) -> str:
    """Deterministic CSV rendering: stable header order, repr floats."""
    if not rows:
        return "\n"
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for key in header:
            val = row.get(key, "")
            if isinstance(val, float):
                cells.append(repr(val))
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
