"""Condensation of one MPC tick into a dense quadratic program.

Decision vector layout: [sagittal jerks (N), sagittal footsteps (m),
lateral jerks (N), lateral footsteps (m)]. The cost trades velocity
tracking, ZMP centering on the reference feet, and the required friction
coefficient; the inequality system stacks ZMP boxes, footstep
reachability boxes and the friction-pyramid rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lipm import AxisState, GaitParams, HorizonMatrices
from .schedule import ConstraintBox, FootPose, SelectionMatrices


@dataclass(frozen=True)
class CostWeights:
    """Weights of the tick cost.

    beta must stay positive: penalizing a CoM derivative is what keeps the
    generated motion viable. alpha_jerk and epsilon_foot are small
    regularizers that make the program strictly convex even when gamma and
    delta are zero; epsilon_foot pulls the footstep variables toward the
    scheduler's nominal targets.
    """

    alpha_jerk: float = 1e-6
    beta: float = 1.0
    gamma: float = 0.0
    delta: float = 0.0
    epsilon_foot: float = 1e-6

    def __post_init__(self):
        if self.beta <= 0.0:
            raise ValueError("beta must be > 0")
        for name in ("alpha_jerk", "gamma", "delta", "epsilon_foot"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0")


@dataclass(frozen=True)
class FrictionProfile:
    """Available friction over the horizon and its pyramid approximation.

    mu_approx is the per-axis bound of the inscribed-pyramid linearization
    of the friction cone: (sqrt(2)/2) * mu_available.
    """

    mu_available: np.ndarray
    mu_approx: np.ndarray = field(init=False)

    def __post_init__(self):
        mu = np.asarray(self.mu_available, dtype=float)
        if mu.ndim != 1 or not np.all(np.isfinite(mu)) or not np.all(mu > 0.0):
            raise ValueError("mu_available must be a 1-D vector of positive values")
        object.__setattr__(self, "mu_available", mu)
        object.__setattr__(self, "mu_approx", (math.sqrt(2.0) / 2.0) * mu)


@dataclass(frozen=True)
class VariableLayout:
    """Column slices of the decision vector for one tick."""

    N: int
    m: int

    @property
    def n(self) -> int:
        return 2 * (self.N + self.m)

    @property
    def jerk_x(self) -> slice:
        return slice(0, self.N)

    @property
    def foot_x(self) -> slice:
        return slice(self.N, self.N + self.m)

    @property
    def jerk_y(self) -> slice:
        return slice(self.N + self.m, 2 * self.N + self.m)

    @property
    def foot_y(self) -> slice:
        return slice(2 * self.N + self.m, 2 * (self.N + self.m))


@dataclass(frozen=True)
class QpProblem:
    """Canonical strictly convex QP: minimize 0.5 u'Qu + p'u s.t. Gu <= h.

    row_groups records which builder produced each inequality block, for
    diagnostics when a tick comes back infeasible.
    """

    Q: np.ndarray
    p: np.ndarray
    G: np.ndarray
    h: np.ndarray
    layout: VariableLayout
    row_groups: tuple

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def group_of_row(self, row: int) -> str:
        for tag, rows in self.row_groups:
            if rows.start <= row < rows.stop:
                return tag
        raise IndexError(f"row {row} outside all groups")


def build_cost(x_state: AxisState, y_state: AxisState, vel_ref: np.ndarray,
               current_foot: FootPose, matrices: HorizonMatrices,
               selection: SelectionMatrices, weights: CostWeights,
               params: GaitParams, nominal_steps: np.ndarray | None = None):
    """Assemble the Hessian and gradient of one tick.

    vel_ref is (N, 2): desired sagittal and lateral velocity per horizon
    interval. nominal_steps is (m, 2): the scheduler's footstep targets
    for the epsilon_foot regularizer (defaults to the current foot).

    Per axis, the jerk block is
        alpha I + beta Pvu'Pvu + gamma Pzu'Pzu + delta D'D,   D = Ppu - Pzu
    with the ZMP-reference coupling -gamma Pzu'U to the footstep block and
    gamma U'U + epsilon I on it. The constant 1/h^2 of the friction term
    is folded into delta, so delta values compare directly across runs.
    """
    N = matrices.horizon
    m = selection.U.shape[1]
    vel_ref = np.asarray(vel_ref, dtype=float)
    if vel_ref.shape != (N, 2):
        raise ValueError(f"vel_ref must have shape ({N}, 2), got {vel_ref.shape}")
    if nominal_steps is None:
        nominal_steps = np.tile([current_foot.x, current_foot.y], (m, 1))
    nominal_steps = np.asarray(nominal_steps, dtype=float)
    if nominal_steps.shape != (m, 2):
        raise ValueError(f"nominal_steps must have shape ({m}, 2)")

    w = weights
    Pvu, Pzu, Pvs, Pzs = matrices.P_vu, matrices.P_zu, matrices.P_vs, matrices.P_zs
    D = matrices.P_pu - Pzu
    S = matrices.P_ps - Pzs

    jerk_block = (w.alpha_jerk * np.eye(N)
                  + w.beta * Pvu.T @ Pvu
                  + w.gamma * Pzu.T @ Pzu
                  + w.delta * D.T @ D)
    U, U_c = selection.U, selection.U_c
    coupling = -w.gamma * Pzu.T @ U
    foot_block = w.gamma * U.T @ U + w.epsilon_foot * np.eye(m)

    block = np.block([[jerk_block, coupling], [coupling.T, foot_block]])
    layout = VariableLayout(N, m)
    Q = np.zeros((layout.n, layout.n))
    Q[: N + m, : N + m] = block
    Q[N + m :, N + m :] = block

    p = np.zeros(layout.n)
    for axis, (state, foot_c, nom) in enumerate((
            (x_state, current_foot.x, nominal_steps[:, 0]),
            (y_state, current_foot.y, nominal_steps[:, 1]))):
        xhat = state.as_array()
        zmp_residual = Pzs @ xhat - U_c * foot_c
        p_jerk = (w.beta * Pvu.T @ (Pvs @ xhat - vel_ref[:, axis])
                  + w.gamma * Pzu.T @ zmp_residual
                  + w.delta * D.T @ (S @ xhat))
        p_foot = -w.gamma * U.T @ zmp_residual - w.epsilon_foot * nom
        sl = (layout.jerk_x, layout.foot_x) if axis == 0 else (layout.jerk_y, layout.foot_y)
        p[sl[0]] = p_jerk
        p[sl[1]] = p_foot

    return Q, p


def build_friction_constraints(x_state: AxisState, y_state: AxisState,
                               matrices: HorizonMatrices,
                               profile: FrictionProfile, params: GaitParams,
                               layout: VariableLayout):
    """Friction-pyramid rows: |required friction| <= mu_approx per interval.

    The required coefficient over the horizon is affine in the jerks,
    (1/h) * (S xhat + D u) with D = Ppu - Pzu and S = Pps - Pzs, so both
    signs give 2N rows per axis with zero footstep columns (4N total).
    """
    N = layout.N
    if profile.mu_available.shape[0] != N:
        raise ValueError("friction profile length must equal the horizon")
    D = matrices.P_pu - matrices.P_zu
    S = matrices.P_ps - matrices.P_zs
    bound = profile.mu_approx * params.pendulum_height_h

    G = np.zeros((4 * N, layout.n))
    h = np.zeros(4 * N)
    row = 0
    for state, jerk_sl in ((x_state, layout.jerk_x), (y_state, layout.jerk_y)):
        drift = S @ state.as_array()
        for sign in (1.0, -1.0):
            G[row : row + N, jerk_sl] = sign * D
            h[row : row + N] = bound - sign * drift
            row += N
    return G, h


def build_zmp_constraints(x_state: AxisState, y_state: AxisState,
                          matrices: HorizonMatrices,
                          selection: SelectionMatrices, boxes: list,
                          current_foot: FootPose, layout: VariableLayout):
    """ZMP-in-foot-rectangle rows for every horizon interval (4N rows).

    The foot position of an interval is the stance coordinate when owned
    by step 0, otherwise the footstep decision variable selected by U, so
    those columns enter the rows with a -U coupling.
    """
    N = layout.N
    if len(boxes) != N:
        raise ValueError("need one ZMP box per horizon interval")
    Pzu, Pzs = matrices.P_zu, matrices.P_zs
    U, U_c = selection.U, selection.U_c
    half = {0: np.array([b.half_x for b in boxes]),
            1: np.array([b.half_y for b in boxes])}
    offset = {0: np.array([b.offset_x for b in boxes]),
              1: np.array([b.offset_y for b in boxes])}

    G = np.zeros((4 * N, layout.n))
    h = np.zeros(4 * N)
    row = 0
    for axis, (state, foot_c) in enumerate(((x_state, current_foot.x),
                                            (y_state, current_foot.y))):
        jerk_sl = layout.jerk_x if axis == 0 else layout.jerk_y
        foot_sl = layout.foot_x if axis == 0 else layout.foot_y
        anchor = U_c * foot_c - Pzs @ state.as_array()
        for sign in (1.0, -1.0):
            G[row : row + N, jerk_sl] = sign * Pzu
            G[row : row + N, foot_sl] = -sign * U
            h[row : row + N] = sign * anchor + sign * offset[axis] + half[axis]
            row += N
    return G, h


def build_footstep_constraints(boxes: list, current_foot: FootPose,
                               layout: VariableLayout):
    """Chained reachability rows for the future footsteps (4m rows)."""
    m = layout.m
    if len(boxes) != m:
        raise ValueError("need one reachability box per future step")
    G = np.zeros((4 * m, layout.n))
    h = np.zeros(4 * m)
    row = 0
    for j, box in enumerate(boxes, start=1):
        for axis, foot_sl in ((0, layout.foot_x), (1, layout.foot_y)):
            half = box.half_x if axis == 0 else box.half_y
            off = box.offset_x if axis == 0 else box.offset_y
            anchor_const = (current_foot.x if axis == 0 else current_foot.y) \
                if box.center_ref == 0 else 0.0
            for sign in (1.0, -1.0):
                G[row, foot_sl.start + j - 1] = sign
                if box.center_ref >= 1:
                    G[row, foot_sl.start + box.center_ref - 1] = -sign
                h[row] = half + sign * off + sign * anchor_const
                row += 1
    return G, h


def assemble(Q: np.ndarray, p: np.ndarray, groups: list,
             layout: VariableLayout) -> QpProblem:
    """Concatenate tagged constraint groups into the canonical QP."""
    n = layout.n
    if Q.shape != (n, n) or p.shape != (n,):
        raise ValueError("cost dimensions do not match the variable layout")
    blocks, rhs, tags = [], [], []
    start = 0
    for tag, (G, h) in groups:
        if G.shape[1] != n or G.shape[0] != h.shape[0]:
            raise ValueError(f"constraint group {tag!r} has inconsistent shape")
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(h))):
            raise ValueError(f"constraint group {tag!r} contains non-finite entries")
        blocks.append(G)
        rhs.append(h)
        tags.append((tag, slice(start, start + G.shape[0])))
        start += G.shape[0]
    G_all = np.vstack(blocks) if blocks else np.zeros((0, n))
    h_all = np.concatenate(rhs) if rhs else np.zeros(0)
    return QpProblem(Q, p, G_all, h_all, layout, tuple(tags))
