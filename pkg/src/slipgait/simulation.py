"""Closed-loop MPC walking simulation with trajectory logging.

Each tick rebuilds the schedule and the condensed QP from the measured
CoM state, solves it, applies the first jerk of each axis over one
interval, and commits the first planned footstep whenever the step cycle
wraps around. The simulated plant is the same exact triple integrator the
controller assumes, so every logged sample was directly constrained by
the solve that produced it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .condense import (CostWeights, FrictionProfile, VariableLayout,
                       assemble, build_cost, build_footstep_constraints,
                       build_friction_constraints, build_zmp_constraints)
from .lipm import (AxisState, GaitParams, HorizonMatrices,
                   build_horizon_matrices, propagate, rcof_of, zmp_of)
from .qp import QpStatus, SolverSettings, solve
from .schedule import (FootPose, Side, SupportPhase, build_selection_matrices,
                       build_timeline, footstep_bounds, nominal_footsteps,
                       zmp_bounds)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant function of time.

    points are (start_time, value) pairs; the value at t is the one of the
    last breakpoint at or before t. The first breakpoint must cover t = 0.
    """

    points: tuple

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        if not pts:
            raise ValueError("schedule must contain at least one breakpoint")
        times = [t for t, _ in pts]
        if any(not math.isfinite(t) or not math.isfinite(v) for t, v in pts):
            raise ValueError("schedule breakpoints must be finite")
        if times != sorted(times) or len(set(times)) != len(times):
            raise ValueError("schedule breakpoints must be strictly increasing")
        if times[0] > 1e-12:
            raise ValueError("schedule must start at or before t = 0")
        object.__setattr__(self, "points", pts)

    def at(self, t: float) -> float:
        value = self.points[0][1]
        for start, v in self.points:
            if t >= start - 1e-9:
                value = v
            else:
                break
        return value

    def segments(self, duration: float) -> list:
        """(start, end, value) spans clipped to [0, duration]."""
        out = []
        for i, (start, v) in enumerate(self.points):
            end = self.points[i + 1][0] if i + 1 < len(self.points) else duration
            lo, hi = max(start, 0.0), min(end, duration)
            if hi > lo:
                out.append((lo, hi, v))
        return out


def friction_schedule_by_step(pairs, params: GaitParams) -> Schedule:
    """Build a friction schedule keyed by step index (step 1 starts at t=0)."""
    cycle = params.cycle_duration
    return Schedule(tuple(((int(k) - 1) * cycle, mu) for k, mu in pairs))


class PreviewMode(enum.Enum):
    """How much of the friction schedule the controller is allowed to see."""

    KNOWN = "known"
    CURRENT_ONLY = "current_only"


@dataclass(frozen=True)
class ScenarioConfig:
    params: GaitParams = GaitParams()
    weights: CostWeights = CostWeights()
    duration: float = 12.0
    velocity_schedule: Schedule = Schedule(((0.0, 0.0),))
    friction_schedule: Schedule = Schedule(((0.0, 0.5 * SQRT2),))
    initial_feet: tuple = (FootPose(0.0, 0.1, Side.LEFT),
                           FootPose(0.0, -0.1, Side.RIGHT))
    initial_com: tuple | None = None
    friction_preview_mode: PreviewMode = PreviewMode.KNOWN
    nominal_step_width: float = 0.2
    steady_settle_time: float = 1.2
    solver: SolverSettings = SolverSettings()

    def __post_init__(self):
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise ValueError("duration: must be finite and > 0")
        ratio = self.duration / self.params.interval_T
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("duration: must be an integer number of intervals")
        stance, swing = self.initial_feet
        if stance.side is swing.side:
            raise ValueError("initial_feet: must be on opposite sides")
        if any(mu <= 0 for _, mu in self.friction_schedule.points):
            raise ValueError("friction_schedule: available friction must be > 0")
        if self.nominal_step_width <= 0:
            raise ValueError("nominal_step_width: must be > 0")
        if self.steady_settle_time < 0:
            raise ValueError("steady_settle_time: must be >= 0")
        if self.initial_com is None:
            # rest over the stance foot: the ZMP starts inside the support
            # rectangle, so the first weight shift is a controlled maneuver
            # instead of an unrecoverable fall toward the swing side
            object.__setattr__(self, "initial_com",
                               (AxisState(stance.x, 0.0, 0.0),
                                AxisState(stance.y, 0.0, 0.0)))

    @property
    def ticks(self) -> int:
        return round(self.duration / self.params.interval_T)


@dataclass(frozen=True)
class SimState:
    """Controller-visible state between ticks."""

    tick: int
    com_x: AxisState
    com_y: AxisState
    stance: FootPose
    phase_tick: int
    prev_solution: np.ndarray | None = None

    def time(self, params: GaitParams) -> float:
        return self.tick * params.interval_T

    def phase_clock(self, params: GaitParams) -> float:
        """Seconds since the last support exchange."""
        return self.phase_tick * params.interval_T

    @staticmethod
    def initial(config: ScenarioConfig) -> "SimState":
        com_x, com_y = config.initial_com
        return SimState(0, com_x, com_y, config.initial_feet[0], 0, None)


@dataclass(frozen=True)
class TickSample:
    """One logged row: the post-propagation state and what governed it."""

    time: float
    com_x: AxisState
    com_y: AxisState
    zmp_x: float
    zmp_y: float
    rcof_x: float
    rcof_y: float
    mu_ap: float
    foot: FootPose
    phase: SupportPhase
    solver_iterations: int
    committed: FootPose | None = None


@dataclass
class TrajectoryLog:
    """Column-oriented record of a scenario run."""

    config: ScenarioConfig
    t: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    ddx: np.ndarray
    y: np.ndarray
    dy: np.ndarray
    ddy: np.ndarray
    zx: np.ndarray
    zy: np.ndarray
    rcof_x: np.ndarray
    rcof_y: np.ndarray
    mu_ap: np.ndarray
    foot_x: np.ndarray
    foot_y: np.ndarray
    side: list
    phase: list
    solver_iters: np.ndarray
    committed_steps: list

    def __len__(self) -> int:
        return self.t.shape[0]


class InfeasibleTickError(RuntimeError):
    """A tick's QP admits no point satisfying all hard constraints."""

    def __init__(self, tick: int, time: float, status: QpStatus):
        super().__init__(
            f"tick {tick} (t = {time:.3f} s) is {status.value}: the hard "
            f"ZMP/friction/footstep constraints cannot all be met")
        self.tick = tick
        self.time = time
        self.status = status


class ScenarioInfeasibleError(RuntimeError):
    """Scenario aborted on an infeasible tick; carries the partial log."""

    def __init__(self, cause: InfeasibleTickError, partial_log: TrajectoryLog):
        super().__init__(str(cause))
        self.tick = cause.tick
        self.time = cause.time
        self.partial_log = partial_log


def _horizon_references(state: SimState, config: ScenarioConfig):
    """Velocity references and friction bounds at the predicted samples."""
    params = config.params
    N = params.horizon_N
    T = params.interval_T
    sample_times = [(state.tick + i) * T for i in range(1, N + 1)]
    vel_ref = np.zeros((N, 2))
    vel_ref[:, 0] = [config.velocity_schedule.at(ts) for ts in sample_times]
    if config.friction_preview_mode is PreviewMode.KNOWN:
        mu_av = np.array([config.friction_schedule.at(ts) for ts in sample_times])
    else:
        mu_av = np.full(N, config.friction_schedule.at(state.time(params)))
    return vel_ref, FrictionProfile(mu_av)


def step_mpc(state: SimState, config: ScenarioConfig,
             matrices: HorizonMatrices | None = None):
    """Run one MPC tick: schedule, condense, solve, propagate, commit.

    Returns the advanced state and the logged sample. Raises
    InfeasibleTickError when the QP has no feasible point; nothing is
    clamped or substituted in that case.
    """
    params = config.params
    T = params.interval_T
    if matrices is None:
        matrices = build_horizon_matrices(params)

    timeline = build_timeline(state.phase_tick * T, state.stance, params)
    selection = build_selection_matrices(timeline)
    m = timeline.future_step_count_m
    layout = VariableLayout(params.horizon_N, m)

    vel_ref, profile = _horizon_references(state, config)
    nominal = nominal_footsteps(state.stance, m, config.nominal_step_width)
    Q, p = build_cost(state.com_x, state.com_y, vel_ref, state.stance,
                      matrices, selection, config.weights, params, nominal)
    groups = [
        ("zmp", build_zmp_constraints(state.com_x, state.com_y, matrices,
                                      selection, zmp_bounds(timeline, params),
                                      state.stance, layout)),
        ("friction", build_friction_constraints(state.com_x, state.com_y,
                                                matrices, profile, params,
                                                layout)),
        ("footstep", build_footstep_constraints(
            footstep_bounds(state.stance, m, params), state.stance, layout)),
    ]
    problem = assemble(Q, p, groups, layout)

    warm = state.prev_solution
    if warm is not None and warm.shape != (layout.n,):
        warm = None
    sol = solve(problem, config.solver, warm)
    if sol.status is not QpStatus.OPTIMAL:
        raise InfeasibleTickError(state.tick, state.time(params), sol.status)

    u = sol.u_star
    com_x = propagate(state.com_x, float(u[layout.jerk_x][0]), T)
    com_y = propagate(state.com_y, float(u[layout.jerk_y][0]), T)
    zx, zy = zmp_of(com_x, params), zmp_of(com_y, params)

    new_phase = state.phase_tick + 1
    stance = state.stance
    committed = None
    if new_phase == params.intervals_per_cycle:
        new_phase = 0
        committed = FootPose(float(u[layout.foot_x][0]),
                             float(u[layout.foot_y][0]),
                             state.stance.side.opposite)
        stance = committed

    sample = TickSample(
        time=(state.tick + 1) * T,
        com_x=com_x, com_y=com_y,
        zmp_x=zx, zmp_y=zy,
        rcof_x=rcof_of(com_x.position, zx, params),
        rcof_y=rcof_of(com_y.position, zy, params),
        mu_ap=float(profile.mu_approx[0]),
        foot=state.stance,
        phase=timeline.phase[0],
        solver_iterations=sol.iterations,
        committed=committed,
    )
    new_state = SimState(state.tick + 1, com_x, com_y, stance, new_phase, u)
    return new_state, sample


def _log_from_samples(config: ScenarioConfig, samples: list) -> TrajectoryLog:
    def col(getter):
        return np.array([getter(s) for s in samples])

    return TrajectoryLog(
        config=config,
        t=col(lambda s: s.time),
        x=col(lambda s: s.com_x.position),
        dx=col(lambda s: s.com_x.velocity),
        ddx=col(lambda s: s.com_x.acceleration),
        y=col(lambda s: s.com_y.position),
        dy=col(lambda s: s.com_y.velocity),
        ddy=col(lambda s: s.com_y.acceleration),
        zx=col(lambda s: s.zmp_x),
        zy=col(lambda s: s.zmp_y),
        rcof_x=col(lambda s: s.rcof_x),
        rcof_y=col(lambda s: s.rcof_y),
        mu_ap=col(lambda s: s.mu_ap),
        foot_x=col(lambda s: s.foot.x),
        foot_y=col(lambda s: s.foot.y),
        side=[s.foot.side.value for s in samples],
        phase=[s.phase.value for s in samples],
        solver_iters=np.array([s.solver_iterations for s in samples], dtype=int),
        committed_steps=[(s.time, s.committed) for s in samples if s.committed],
    )


def run_scenario(config: ScenarioConfig) -> TrajectoryLog:
    """Run the full closed loop; deterministic for a given config."""
    matrices = build_horizon_matrices(config.params)
    state = SimState.initial(config)
    samples: list = []
    for _ in range(config.ticks):
        try:
            state, sample = step_mpc(state, config, matrices)
        except InfeasibleTickError as err:
            raise ScenarioInfeasibleError(err, _log_from_samples(config, samples))
        samples.append(sample)
    return _log_from_samples(config, samples)


def steady_window(config: ScenarioConfig) -> tuple:
    """Evaluation span: the dominant command segment minus its transients.

    The segment with the largest commanded speed (longest on ties) is
    trimmed by steady_settle_time at its start, and also at its end when
    another command follows, because the controller previews the upcoming
    switch and reacts before the boundary.
    """
    segs = config.velocity_schedule.segments(config.duration)
    start, end, _ = max(segs, key=lambda s: (abs(s[2]), s[1] - s[0]))
    settle = config.steady_settle_time
    if end < config.duration - 1e-9:
        end -= settle
    return (min(start + settle, end), end)


def summarize(log: TrajectoryLog) -> dict:
    """Scenario metrics: steady tracking quality, friction demand, slack.

    Velocities and the sagittal friction requirement are evaluated over
    the steady window; the constraint slack is the worst over the whole
    run and should not exceed the solver feasibility tolerance.
    """
    cfg = log.config
    params = cfg.params
    start, end = steady_window(cfg)
    sel = (log.t > start + 1e-9) & (log.t <= end + 1e-9)

    if np.any(sel):
        vel_mean = float(np.mean(log.dx[sel]))
        vel_std = float(np.std(log.dx[sel]))
        rcof_steady = float(np.max(np.abs(log.rcof_x[sel])))
    else:
        vel_mean = vel_std = rcof_steady = 0.0

    box_x = np.abs(log.zx - log.foot_x) - params.foot_length_a / 2.0
    box_y = np.abs(log.zy - log.foot_y) - params.foot_width_b / 2.0
    fric_x = np.abs(log.rcof_x) - log.mu_ap
    fric_y = np.abs(log.rcof_y) - log.mu_ap
    violation = float(max(0.0, box_x.max(), box_y.max(),
                          fric_x.max(), fric_y.max())) if len(log) else 0.0

    anchors = [cfg.initial_feet[0]] + [foot for _, foot in log.committed_steps]
    step_lengths = [abs(b.x - a.x) for a, b in zip(anchors, anchors[1:])]

    ipc = params.intervals_per_cycle
    T = params.interval_T
    per_step = []
    n_cycles = len(log) // ipc
    for c in range(1, n_cycles):
        k0, k1 = c * ipc - 1, (c + 1) * ipc - 1
        t0, t1 = log.t[k0], log.t[k1]
        if t0 >= start - 1e-9 and t1 <= end + 1e-9:
            per_step.append(float((log.x[k1] - log.x[k0]) / (ipc * T)))

    return {
        "steady_velocity_mean": vel_mean,
        "steady_velocity_std": vel_std,
        "max_rcof_steady": rcof_steady,
        "max_constraint_violation": violation,
        "step_lengths": step_lengths,
        "per_step_velocity_steady": per_step,
        "steady_window": [start, end],
    }


DELTA_SWEEP_GRID = (0.0, 1.0, 10.0, 50.0, 100.0, 200.0)


def preset_scenarios() -> dict:
    """The compiled-in scenarios reproducing the two simulation studies."""
    walk_then_stop = Schedule(((0.0, 0.0), (2.0, 1.0), (8.0, 0.0)))
    params = GaitParams()
    presets = {
        "s1_beta": ScenarioConfig(
            weights=CostWeights(beta=1.0),
            velocity_schedule=walk_then_stop,
            friction_schedule=Schedule(((0.0, 0.5 * SQRT2),)),
        ),
        "s1_beta_gamma": ScenarioConfig(
            weights=CostWeights(beta=1.0, gamma=100.0),
            velocity_schedule=walk_then_stop,
            friction_schedule=Schedule(((0.0, 0.5 * SQRT2),)),
        ),
        "s1_delta_sweep": ScenarioConfig(
            weights=CostWeights(beta=1.0, gamma=100.0, delta=0.0),
            velocity_schedule=walk_then_stop,
            friction_schedule=Schedule(((0.0, 0.5 * SQRT2),)),
        ),
        "s2_surface_change": ScenarioConfig(
            weights=CostWeights(beta=1.0, gamma=100.0, delta=1.0),
            velocity_schedule=Schedule(((0.0, 1.0),)),
            friction_schedule=friction_schedule_by_step(
                ((1, 0.4 * SQRT2), (8, 0.16 * SQRT2)), params),
            friction_preview_mode=PreviewMode.KNOWN,
        ),
    }
    return presets
