"""Command-line interface.

Subcommands: ``solve-one``, ``solve-all``, ``solve-random``, ``refine``,
``bench``.  Exit codes: 0 success, 2 argument error, 3 numerical failure,
4 budget exceeded; failures emit a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .errors import BudgetExceededError, EigenpathError
from .linalg import sample_gaussian_matrix
from .rng import RngStream

EXIT_OK = 0
EXIT_ARGUMENT = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eigenpath", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, need_input=True):
        if need_input:
            sp.add_argument("--input", type=str, default=None, help="matrix file (JSON or EIGP binary)")
            sp.add_argument("--n", type=int, default=None, help="dimension of a generated Gaussian input")
            sp.add_argument("--seed", type=int, default=None, help="seed for generated inputs / randomized runs")
            sp.add_argument("--sigma", type=float, default=1.0)
        sp.add_argument("--out", type=str, default=None, help="output path (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("solve-one", help="one eigenpair from the deterministic rank-one start")
    common(sp)
    sp = sub.add_parser("solve-all", help="all eigenpairs from the hexagonal-lattice start")
    common(sp)
    sp = sub.add_parser("solve-random", help="one eigenpair from a random start triple")
    common(sp)
    sp = sub.add_parser("refine", help="refine a pair to relative-error accuracy")
    sp.add_argument("--input", type=str, required=True)
    sp.add_argument("--pair", type=str, required=True, help="JSON {zeta: [re, im], w: [[re, im], ...]} or a path to it")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--format", choices=("json",), default="json")
    sp = sub.add_parser("bench", help="Monte-Carlo experiment families a..f")
    sp.add_argument("--experiment", choices=tuple("abcdef"), required=True)
    sp.add_argument("--n", type=str, default="6", help="dimension (comma list for experiment e)")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--center", type=str, default=None, help="matrix file used as Gaussian center")
    sp.add_argument("--epsilon", type=float, default=1e-6)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--quadrature-points", type=int, default=10_000)
    sp.add_argument("--out", type=str, default=None, help="CSV output path")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _load_or_generate(args) -> np.ndarray:
    if args.input is not None:
        return harness.load_matrix(args.input)
    if args.n is None or args.seed is None:
        raise ValueError("either --input or both --n and --seed are required")
    rng = RngStream(args.seed, 0)
    return sample_gaussian_matrix(rng, args.n, args.n, sigma=args.sigma)


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_solve_one(args) -> int:
    A = _load_or_generate(args)
    res = harness.solve_one(A)
    payload = res.to_dict()
    payload["trace"] = res.trace.to_dict()
    payload["trace"]["seed"] = args.seed
    _emit(args, json.dumps(payload))
    return EXIT_OK


def _cmd_solve_all(args) -> int:
    A = _load_or_generate(args)
    res = harness.solve_all(A)
    payload = {
        "pairs": [r.to_dict() if r is not None else None for r in res.results],
        "failures": {str(k): v for k, v in res.errors.items()},
        "pairwise_distinct": res.pairwise_distinct,
    }
    _emit(args, json.dumps(payload))
    return EXIT_OK


def _cmd_solve_random(args) -> int:
    if args.seed is None:
        raise ValueError("--seed is required for solve-random")
    A = _load_or_generate(args)
    rng = RngStream(args.seed, 1)
    res = harness.solve_random(A, rng)
    payload = res.to_dict()
    payload["trace"] = res.trace.to_dict()
    payload["trace"]["seed"] = args.seed
    _emit(args, json.dumps(payload))
    return EXIT_OK


def _parse_pair(text: str):
    try:
        if Path(text).is_file():
            text = Path(text).read_text()
    except OSError:  # inline JSON can exceed the OS filename length limit
        pass
    obj = json.loads(text)
    zeta = complex(obj["zeta"][0], obj["zeta"][1])
    w = np.array([complex(re, im) for re, im in obj["w"]], dtype=np.complex128)
    return zeta, w


def _cmd_refine(args) -> int:
    A = harness.load_matrix(args.input)
    zeta, w = _parse_pair(args.pair)
    zeta2, w2 = harness.refine_pair(A, zeta, w, args.epsilon)
    payload = {
        "zeta": [zeta2.real, zeta2.imag],
        "w": [[z.real, z.imag] for z in w2],
    }
    _emit(args, json.dumps(payload))
    return EXIT_OK


def _cmd_bench(args) -> int:
    if "," in args.n:
        n = [int(x) for x in args.n.split(",") if x]
    else:
        n = int(args.n)
    center = harness.load_matrix(args.center) if args.center else None
    cfg = harness.ExperimentConfig(
        experiment=args.experiment,
        n=n,
        trials=args.trials,
        seed=args.seed,
        sigma=args.sigma,
        center=center,
        epsilon=args.epsilon,
        jobs=args.jobs,
        quadrature_points=args.quadrature_points,
    )
    rows, report = harness.run_experiment(cfg)
    if args.out:
        Path(args.out).write_text(harness.rows_to_csv(rows))
    if args.format == "csv" and not args.out:
        sys.stdout.write(harness.rows_to_csv(rows))
    sys.stdout.write(report.to_json() + "\n")
    return EXIT_OK


_COMMANDS = {
    "solve-one": _cmd_solve_one,
    "solve-all": _cmd_solve_all,
    "solve-random": _cmd_solve_random,
    "refine": _cmd_refine,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ARGUMENT if exc.code not in (0, None) else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_ARGUMENT
    except BudgetExceededError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_BUDGET
    except EigenpathError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
