"""Condensed linear MPC with terminal ingredients computed from first principles."""

from .invariant_sets import (StabilizingSetResult, certify_control_invariant, feasible_initial_set,
                             max_stabilizing_set)
from .lp import LpProblem, SolveOutcome, Status, solve_lp
from .mpc import (DiscreteLtiSystem, LiftedProblem, MpcConfig, ReferenceTrajectory, SimTrace,
                  StepResult, admissible_input_set, build_lifted, build_regulation_qp,
                  build_tracking_qp, closed_loop_simulate, double_integrator, mpc_step,
                  trajectory_cost)
from .polytope import (HPolyhedron, affine_image, affine_preimage, contains,
                       fourier_motzkin_project, intersect, is_empty, is_subset, minkowski_sum,
                       remove_redundant, set_equal)
from .qp import QpProblem, check_kkt, solve_qp
from .riccati import CostWeights, TerminalIngredients, lqr_gain, solve_dare

__version__ = "0.1.0"
