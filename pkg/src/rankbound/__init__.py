"""Error bounds, exact penalties and multi-stage convex relaxation for
rank-constrained matrix problems over balls, density and correlation sets."""

from .bounds import (BoundReport, bound_feasible_global, bound_feasible_local,
                     bound_solution_global, bound_solution_local, xi_bound)
from .errors import (ConvergenceFailure, InvalidInput, MissingConstant, NumericalFailure,
                     RankboundError, Unsupported)
from .mscr import MscrConfig, MscrTrace, auto_rho0, exact_penalty_threshold, penalty_objective, run
from .objectives import MatrixDistance, ObjectiveModel, Quadratic
from .sets import SetSpec, dist_to_omega, member, omega_residual_surrogate, project
from .spectral import decompose, kyfan_norm, kyfan_subgradient, tail_sum, truncate
from .subsolver import SubproblemSpec, solve_stage, svt
from .witness import (WitnessCertificate, local_feasibility_certificate, witness_ball,
                      witness_correlation, witness_density)

__version__ = "0.1.0"
