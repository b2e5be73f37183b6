"""Certified eigenpair computation by homotopy continuation.

The solver follows the eigenpair lifting of a great-circle arc of matrices
with a rigorously derived step-size controller, keeps every iterate inside
the basin of quadratic Newton convergence, and refines results to relative
forward error on request.  A Monte-Carlo harness reproduces the exactly
computable expectations that certify the random-start machinery.
"""

from .backend import NUMBA_ENABLED, backend_name
from .conditioning import (
    EigenTriple,
    ReducedOperator,
    left_eigenvector,
    mu,
    mu_av,
    mu_F_av,
    mu_frobenius,
    mu_lambda,
    mu_max,
    reduced_operator,
)
from .errors import (
    BudgetExceededError,
    DegenerateArcError,
    EigenpathError,
    IllPosedError,
    NonconvergenceError,
    OracleFailureError,
    PathFailureError,
    SigmaCrossingError,
)
from .geometry import GreatCircleArc, dist_A, great_circle, proj_distance, triple_distance
from .harness import (
    AllEigenpairsResult,
    ExperimentConfig,
    SolveResult,
    StatsReport,
    certified_witness,
    load_matrix,
    refine_pair,
    run_experiment,
    save_matrix_binary,
    save_matrix_json,
    solve_all,
    solve_one,
    solve_random,
)
from .homotopy import (
    DEFAULT_LEDGER,
    ConstantLedger,
    HomotopyTrace,
    choose_step,
    interval_condition_lengths,
    path_follow,
    step_count_ceiling,
)
from .initial_triples import (
    HexLattice,
    OmegaSample,
    hex_diagonal,
    hex_lattice,
    montecarlo_trick2,
    psi,
    random_initial_triple,
    sample_omega,
    single_start,
)
from .linalg import (
    frobenius_inner,
    frobenius_norm,
    householder_frame,
    pseudoinverse,
    qr_decompose,
    sample_gaussian_matrix,
    sample_haar_unitary,
    sample_truncated_gaussian,
    svd,
)
from .newton import ApproxEigenpair, NewtonStep, beta, certify_radius, newton_iterate, newton_step
from .oracle import continue_path, reference_eigenpairs
from .refine import relative_error_refine
from .rng import RngStream

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
