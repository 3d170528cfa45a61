"""Walking pattern generation for slippery terrain.

Linear MPC over CoM jerks and footstep locations with hard ZMP,
reachability and friction-pyramid constraints, plus the closed-loop
simulation, logging and plotting around it.
"""

from .condense import (CostWeights, FrictionProfile, QpProblem,
                       VariableLayout, assemble, build_cost,
                       build_footstep_constraints,
                       build_friction_constraints, build_zmp_constraints)
from .lipm import (AxisState, GaitParams, HorizonMatrices,
                   build_horizon_matrices, propagate, rcof_of, zmp_of)
from .qp import QpSolution, QpStatus, SolverSettings, check_kkt, solve
from .schedule import (ConstraintBox, FootPose, SelectionMatrices, Side,
                       SupportPhase, SupportTimeline,
                       build_selection_matrices, build_timeline,
                       footstep_bounds, nominal_footsteps, zmp_bounds)
from .simulation import (DELTA_SWEEP_GRID, PreviewMode, ScenarioConfig,
                         ScenarioInfeasibleError, Schedule, SimState,
                         TrajectoryLog, friction_schedule_by_step,
                         preset_scenarios, run_scenario, step_mpc,
                         steady_window, summarize)

__version__ = "0.1.0"
