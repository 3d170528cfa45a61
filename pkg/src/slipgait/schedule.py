"""Step timing, support bookkeeping and per-interval geometric constraints.

A step cycle starts at the support exchange: one double-support interval
(owned by the incoming stance foot) followed by the single-support
intervals. The horizon intervals are labeled with the step that owns them;
those labels drive the footstep selection matrices and the ZMP /
reachability boxes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .lipm import GaitParams


class Side(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def opposite(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT

    @property
    def sign(self) -> float:
        """Lateral sign convention: left feet sit at positive y."""
        return 1.0 if self is Side.LEFT else -1.0


class SupportPhase(enum.Enum):
    SINGLE = "SS"
    DOUBLE = "DS"


@dataclass(frozen=True)
class FootPose:
    """Planar foot placement (feet are axis-aligned, no rotation)."""

    x: float
    y: float
    side: Side

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("FootPose coordinates must be finite")


@dataclass(frozen=True)
class SupportTimeline:
    """Per-interval step ownership and phase over the horizon.

    step_index[i] = 0 for intervals owned by the current stance foot,
    j >= 1 for the j-th future step. future_step_count_m is the number of
    future steps whose onset falls inside the horizon.
    """

    step_index: np.ndarray
    phase: tuple
    future_step_count_m: int
    stance: FootPose


@dataclass(frozen=True)
class SelectionMatrices:
    """Indicator operators assigning each horizon interval to one foot.

    Every row of [U_c | U] contains exactly one 1; the reference ZMP over
    the horizon is U_c * stance_coordinate + U @ future_step_coordinates.
    """

    U_c: np.ndarray
    U: np.ndarray


@dataclass(frozen=True)
class ConstraintBox:
    """Axis-aligned box tied to a foot, possibly offset from it.

    center_ref = 0 anchors the box on the current stance foot; j >= 1 on
    the decision variable of future step j. The admissible region per axis
    is [anchor + offset - half, anchor + offset + half].
    """

    center_ref: int
    half_x: float
    half_y: float
    offset_x: float = 0.0
    offset_y: float = 0.0

    def __post_init__(self):
        if self.half_x <= 0.0 or self.half_y <= 0.0:
            raise ValueError("box half-dimensions must be positive")


def build_timeline(phase_clock: float, current_support: FootPose,
                   params: GaitParams) -> SupportTimeline:
    """Label each horizon interval with its owning step and support phase.

    phase_clock is the time elapsed since the last support exchange, in
    [0, Tss + Tds). The exchange instant opens a cycle with its
    double-support interval, so ownership advances every
    intervals_per_cycle intervals from there.
    """
    cycle = params.cycle_duration
    if not (0.0 <= phase_clock < cycle):
        raise ValueError(f"phase_clock must be in [0, {cycle}), got {phase_clock}")
    ipc = params.intervals_per_cycle
    nds = params.double_support_intervals
    tick0 = round(phase_clock / params.interval_T)

    ticks = tick0 + np.arange(params.horizon_N)
    step_index = ticks // ipc
    pos = ticks % ipc
    phase = tuple(SupportPhase.DOUBLE if p < nds else SupportPhase.SINGLE for p in pos)

    m = int(step_index.max())
    if m > params.max_future_steps_m:
        raise ValueError(
            f"horizon covers {m} future steps but max_future_steps_m is "
            f"{params.max_future_steps_m}")
    return SupportTimeline(step_index.astype(int), phase, m, current_support)


def build_selection_matrices(timeline: SupportTimeline) -> SelectionMatrices:
    """Expand the ownership labels into the 0/1 selection operators."""
    idx = timeline.step_index
    N = idx.shape[0]
    m = timeline.future_step_count_m
    U_c = (idx == 0).astype(float)
    U = np.zeros((N, m))
    for j in range(1, m + 1):
        U[:, j - 1] = (idx == j).astype(float)
    return SelectionMatrices(U_c, U)


def footstep_bounds(prev_foot: FootPose, m: int, params: GaitParams) -> list:
    """Reachability box for each future step, chained onto its predecessor.

    Step j is bounded relative to step j-1 (the stance foot for j = 1,
    otherwise the previous decision variable): at most Lmax of sagittal
    travel, and a lateral offset between Wmin and Wmax on the stepping
    side, which keeps the feet from crossing.
    """
    boxes = []
    side = prev_foot.side
    for j in range(1, m + 1):
        step_side = side.opposite
        mid = (params.max_step_width_Wmax + params.min_step_width_Wmin) / 2.0
        boxes.append(ConstraintBox(
            center_ref=j - 1,
            half_x=params.max_step_length_Lmax,
            half_y=(params.max_step_width_Wmax - params.min_step_width_Wmin) / 2.0,
            offset_y=step_side.sign * mid,
        ))
        side = step_side
    return boxes


def zmp_bounds(timeline: SupportTimeline, params: GaitParams) -> list:
    """Foot-rectangle ZMP box for every horizon interval.

    Double-support intervals use the single incoming-foot rectangle, so
    every box stays convex and tied to exactly one foot.
    """
    return [
        ConstraintBox(center_ref=int(j),
                      half_x=params.foot_length_a / 2.0,
                      half_y=params.foot_width_b / 2.0)
        for j in timeline.step_index
    ]


def nominal_footsteps(stance: FootPose, m: int, step_width: float) -> np.ndarray:
    """Zero-progress footstep targets used for tie-breaking regularization.

    Keeps the sagittal target on the stance foot and alternates the
    lateral target across the nominal stance width, which is what stepping
    in place converges to.
    """
    targets = np.empty((m, 2))
    y = stance.y
    side = stance.side
    for j in range(m):
        side = side.opposite
        y = y + side.sign * step_width
        targets[j] = (stance.x, y)
    return targets
