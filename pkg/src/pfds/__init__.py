"""Penalized full-dimensional multidimensional scaling.

Minimize least-squares stress over full-dimensional configurations while a
quadratic penalty on the trailing dimensions is increased along a schedule,
steering the full-dimensional global minimum toward a low-dimensional
solution.
"""
from .align import AlignmentSet, match_configurations, procrustes_rotation
from .datasets import TransformKind, apply_transform, parties, read_matrix, read_problem, simplex, write_matrix
from .diagnostics import Certificate, RankReport, cfds_certificate, check_uni, gower_rank, lambda_bound
from .errors import NumericalError, PfdsError, ValidationError
from .mdscore import MdsProblem, normalize
from .oracle1d import OracleResult, best_coords_for_order, count_local_minima_1d, global_min_1d
from .solver import SolveResult, SolverSettings, principal_axes, solve_penalized
from .trajectory import (
    AuditReport,
    LambdaSchedule,
    TrajectoryRecord,
    audit_monotonicity,
    detect_lambda_plus,
    run_trajectory,
)

__version__ = "0.1.0"
