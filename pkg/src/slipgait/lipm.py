"""Discrete linear-inverted-pendulum dynamics and preview-horizon operators.

The CoM of each horizontal axis is a triple integrator driven by piecewise
constant jerk. Stacking the exact per-interval update over a horizon of N
intervals gives the linear operators that map (initial state, jerk sequence)
to the predicted positions, velocities and ZMP positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GaitParams:
    """Physical constants, step timing and horizon sizing.

    Units are SI throughout (seconds, meters). Step timing must be an
    integer number of MPC intervals; the default horizon spans two full
    step cycles.
    """

    interval_T: float = 0.1
    pendulum_height_h: float = 0.8
    gravity_g: float = 9.81
    single_support_Tss: float = 0.5
    double_support_Tds: float = 0.1
    foot_length_a: float = 0.2
    foot_width_b: float = 0.1
    max_step_length_Lmax: float = 0.6
    max_step_width_Wmax: float = 0.4
    min_step_width_Wmin: float = 0.1
    horizon_N: int = 12
    max_future_steps_m: int = 2

    def __post_init__(self):
        positive = {
            "interval_T": self.interval_T,
            "pendulum_height_h": self.pendulum_height_h,
            "gravity_g": self.gravity_g,
            "single_support_Tss": self.single_support_Tss,
            "double_support_Tds": self.double_support_Tds,
            "foot_length_a": self.foot_length_a,
            "foot_width_b": self.foot_width_b,
            "max_step_length_Lmax": self.max_step_length_Lmax,
            "max_step_width_Wmax": self.max_step_width_Wmax,
            "min_step_width_Wmin": self.min_step_width_Wmin,
        }
        for name, value in positive.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if self.min_step_width_Wmin >= self.max_step_width_Wmax:
            raise ValueError("min_step_width_Wmin must be < max_step_width_Wmax")
        if self.horizon_N <= 0:
            raise ValueError(f"horizon_N must be > 0, got {self.horizon_N}")
        if self.max_future_steps_m <= 0:
            raise ValueError("max_future_steps_m must be > 0")
        for name, dur in (("single_support_Tss", self.single_support_Tss),
                          ("double_support_Tds", self.double_support_Tds)):
            ratio = dur / self.interval_T
            if abs(ratio - round(ratio)) > 1e-9:
                raise ValueError(f"{name} must be an integer multiple of interval_T")

    @property
    def cycle_duration(self) -> float:
        """Duration of one full step cycle (single + double support)."""
        return self.single_support_Tss + self.double_support_Tds

    @property
    def intervals_per_cycle(self) -> int:
        return round(self.cycle_duration / self.interval_T)

    @property
    def double_support_intervals(self) -> int:
        return round(self.double_support_Tds / self.interval_T)


@dataclass(frozen=True)
class AxisState:
    """CoM state of one horizontal axis: position, velocity, acceleration."""

    position: float = 0.0
    velocity: float = 0.0
    acceleration: float = 0.0

    def __post_init__(self):
        if not all(map(math.isfinite, (self.position, self.velocity, self.acceleration))):
            raise ValueError("AxisState components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.position, self.velocity, self.acceleration])

    @staticmethod
    def from_array(arr) -> "AxisState":
        p, v, a = (float(x) for x in arr)
        return AxisState(p, v, a)


@dataclass(frozen=True)
class HorizonMatrices:
    """Stacked integration operators over the preview horizon.

    For state x (3-vector) and jerk sequence u (N-vector):
        positions  = P_ps @ x + P_pu @ u
        velocities = P_vs @ x + P_vu @ u
        zmp        = P_zs @ x + P_zu @ u
    Row i predicts the sample at the end of interval i (1-based).
    """

    P_ps: np.ndarray
    P_vs: np.ndarray
    P_zs: np.ndarray
    P_pu: np.ndarray
    P_vu: np.ndarray
    P_zu: np.ndarray

    @property
    def horizon(self) -> int:
        return self.P_ps.shape[0]


def build_horizon_matrices(params: GaitParams) -> HorizonMatrices:
    """Build the preview operators for the given interval count and timing.

    Closed forms of the triple-integrator stacking: row i of P_ps is
    [1, iT, (iT)^2/2]; entry (i, j) of P_pu is (1 + 3d + 3d^2) T^3/6 with
    d = i - j >= 0, and analogously for velocity and ZMP.
    """
    N = params.horizon_N
    T = params.interval_T
    hg = params.pendulum_height_h / params.gravity_g

    i = np.arange(1, N + 1, dtype=float)
    P_ps = np.column_stack([np.ones(N), i * T, (i * T) ** 2 / 2.0])
    P_vs = np.column_stack([np.zeros(N), np.ones(N), i * T])
    P_zs = P_ps.copy()
    P_zs[:, 2] -= hg

    d = i[:, None] - i[None, :]  # whole intervals between input j and sample i
    lower = d >= 0
    P_pu = np.where(lower, (1.0 + 3.0 * d + 3.0 * d ** 2) * T ** 3 / 6.0, 0.0)
    P_vu = np.where(lower, (1.0 + 2.0 * d) * T ** 2 / 2.0, 0.0)
    P_zu = np.where(lower, P_pu - hg * T, 0.0)

    return HorizonMatrices(P_ps, P_vs, P_zs, P_pu, P_vu, P_zu)


def propagate(state: AxisState, jerk: float, T: float) -> AxisState:
    """Advance one axis by one interval of constant jerk (exact update)."""
    if not (math.isfinite(jerk) and math.isfinite(T)):
        raise ValueError("jerk and T must be finite")
    p, v, a = state.position, state.velocity, state.acceleration
    return AxisState(
        p + v * T + a * T ** 2 / 2.0 + jerk * T ** 3 / 6.0,
        v + a * T + jerk * T ** 2 / 2.0,
        a + jerk * T,
    )


def zmp_of(state: AxisState, params: GaitParams) -> float:
    """ZMP position of one axis under the constant-height pendulum model."""
    return state.position - (params.pendulum_height_h / params.gravity_g) * state.acceleration


def rcof_of(com_position: float, zmp_position: float, params: GaitParams) -> float:
    """Signed friction coefficient the motion requires along one axis.

    Ratio of tangential to normal contact force: (com - zmp) / h. Zero for
    a static posture, growing with the CoM-to-ZMP separation.
    """
    return (com_position - zmp_position) / params.pendulum_height_h
