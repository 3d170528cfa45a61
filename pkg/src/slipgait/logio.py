"""Delimited trajectory logs, metric files and scenario documents.

The CSV schema is fixed: one row per tick, header exactly as CSV_COLUMNS.
Scenario files are JSON mirrors of ScenarioConfig; unknown keys are
rejected so typos fail loudly instead of silently using defaults.
"""

from __future__ import annotations

import csv
import json
from dataclasses import replace
from pathlib import Path

import numpy as np

from .condense import CostWeights
from .lipm import AxisState, GaitParams
from .qp import SolverSettings
from .schedule import FootPose, Side
from .simulation import (PreviewMode, ScenarioConfig, Schedule, TrajectoryLog,
                         friction_schedule_by_step, preset_scenarios)

CSV_COLUMNS = ("t", "x", "dx", "ddx", "y", "dy", "ddy", "zx", "zy",
               "rcof_x", "rcof_y", "mu_ap", "foot_x", "foot_y",
               "side", "phase", "solver_iters")

_FLOAT_COLUMNS = CSV_COLUMNS[:14]


class ScenarioFileError(ValueError):
    """A scenario document failed validation; message names the key."""


def _fmt(value: float) -> str:
    return format(float(value), ".12g")


def write_csv(log: TrajectoryLog, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for k in range(len(log)):
            row = [_fmt(getattr(log, name)[k]) for name in _FLOAT_COLUMNS]
            row += [log.side[k], log.phase[k], str(int(log.solver_iters[k]))]
            writer.writerow(row)


def read_csv(path) -> dict:
    """Parse a trajectory CSV into column arrays (schema-checked)."""
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise ScenarioFileError(f"{path}: empty file, no header")
        if header != CSV_COLUMNS:
            unexpected = set(header).symmetric_difference(CSV_COLUMNS)
            raise ScenarioFileError(
                f"{path}: header mismatch (offending columns: {sorted(unexpected)})")
        rows = list(reader)
    if not rows:
        raise ScenarioFileError(f"{path}: no data rows")
    cols: dict = {}
    for i, name in enumerate(CSV_COLUMNS):
        values = [r[i] for r in rows]
        if name in _FLOAT_COLUMNS:
            cols[name] = np.array([float(v) for v in values])
        elif name == "solver_iters":
            cols[name] = np.array([int(v) for v in values], dtype=int)
        else:
            cols[name] = values
    if any(s not in ("L", "R") for s in cols["side"]):
        raise ScenarioFileError(f"{path}: column 'side' must be L or R")
    if any(p not in ("SS", "DS") for p in cols["phase"]):
        raise ScenarioFileError(f"{path}: column 'phase' must be SS or DS")
    return cols


def write_metrics(metrics: dict, path) -> None:
    Path(path).write_text(json.dumps(metrics, indent=2, sort_keys=True) + "\n")


# --- scenario documents ---------------------------------------------------

_PARAM_KEYS = ("interval_T", "pendulum_height_h", "gravity_g",
               "single_support_Tss", "double_support_Tds", "foot_length_a",
               "foot_width_b", "max_step_length_Lmax", "max_step_width_Wmax",
               "min_step_width_Wmin", "horizon_N", "max_future_steps_m")
_WEIGHT_KEYS = ("alpha_jerk", "beta", "gamma", "delta", "epsilon_foot")
_TOP_KEYS = ("preset", "params", "weights", "duration", "velocity_schedule",
             "friction_schedule", "friction_schedule_by_step", "initial_feet",
             "initial_com", "friction_preview_mode", "nominal_step_width",
             "steady_settle_time")


def _check_keys(doc: dict, allowed, where: str) -> None:
    unknown = sorted(set(doc) - set(allowed))
    if unknown:
        raise ScenarioFileError(f"{where}: unknown keys {unknown}")


def _schedule_from(doc, where: str) -> Schedule:
    if not isinstance(doc, list) or not doc:
        raise ScenarioFileError(f"{where}: must be a non-empty list of [time, value] pairs")
    try:
        return Schedule(tuple((float(t), float(v)) for t, v in doc))
    except (TypeError, ValueError) as err:
        raise ScenarioFileError(f"{where}: {err}") from None


def _foot_from(doc, where: str) -> FootPose:
    _check_keys(doc, ("x", "y", "side"), where)
    try:
        side = Side(doc["side"])
    except (KeyError, ValueError):
        raise ScenarioFileError(f"{where}.side: must be 'L' or 'R'") from None
    return FootPose(float(doc.get("x", 0.0)), float(doc.get("y", 0.0)), side)


def scenario_from_dict(doc: dict) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed scenario document."""
    if not isinstance(doc, dict):
        raise ScenarioFileError("scenario document must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "scenario")

    if "preset" in doc:
        presets = preset_scenarios()
        name = doc["preset"]
        if name not in presets:
            raise ScenarioFileError(
                f"preset: unknown preset {name!r} (available: {sorted(presets)})")
        config = presets[name]
    else:
        config = ScenarioConfig()

    if "params" in doc:
        _check_keys(doc["params"], _PARAM_KEYS, "params")
        merged = {k: getattr(config.params, k) for k in _PARAM_KEYS}
        merged.update(doc["params"])
        try:
            config = replace(config, params=GaitParams(**merged))
        except ValueError as err:
            raise ScenarioFileError(f"params: {err}") from None
    if "weights" in doc:
        _check_keys(doc["weights"], _WEIGHT_KEYS, "weights")
        merged = {k: getattr(config.weights, k) for k in _WEIGHT_KEYS}
        merged.update(doc["weights"])
        try:
            config = replace(config, weights=CostWeights(**merged))
        except ValueError as err:
            raise ScenarioFileError(f"weights: {err}") from None
    if "velocity_schedule" in doc:
        config = replace(config, velocity_schedule=_schedule_from(
            doc["velocity_schedule"], "velocity_schedule"))
    if "friction_schedule" in doc and "friction_schedule_by_step" in doc:
        raise ScenarioFileError(
            "friction_schedule: give either a time-keyed or a step-keyed "
            "schedule, not both")
    if "friction_schedule" in doc:
        config = replace(config, friction_schedule=_schedule_from(
            doc["friction_schedule"], "friction_schedule"))
    if "friction_schedule_by_step" in doc:
        pairs = doc["friction_schedule_by_step"]
        if (not isinstance(pairs, list) or not pairs
                or any(len(p) != 2 for p in pairs)):
            raise ScenarioFileError(
                "friction_schedule_by_step: must be a non-empty list of "
                "[step_index, value] pairs")
        steps = [int(k) for k, _ in pairs]
        if steps[0] != 1 or steps != sorted(set(steps)):
            raise ScenarioFileError(
                "friction_schedule_by_step: step indices must start at 1 "
                "and increase")
        try:
            config = replace(config, friction_schedule=friction_schedule_by_step(
                [(k, float(v)) for k, v in pairs], config.params))
        except ValueError as err:
            raise ScenarioFileError(f"friction_schedule_by_step: {err}") from None
    if "initial_feet" in doc:
        feet = doc["initial_feet"]
        if not isinstance(feet, list) or len(feet) != 2:
            raise ScenarioFileError("initial_feet: must be a list of two feet")
        config = replace(config, initial_feet=(
            _foot_from(feet[0], "initial_feet[0]"),
            _foot_from(feet[1], "initial_feet[1]")))
    if "initial_com" in doc:
        com = doc["initial_com"]
        _check_keys(com, ("x", "y"), "initial_com")
        try:
            config = replace(config, initial_com=(
                AxisState(*map(float, com["x"])), AxisState(*map(float, com["y"]))))
        except (KeyError, TypeError, ValueError):
            raise ScenarioFileError(
                "initial_com: needs x and y triples [position, velocity, "
                "acceleration]") from None
    if "friction_preview_mode" in doc:
        try:
            mode = PreviewMode(doc["friction_preview_mode"])
        except ValueError:
            raise ScenarioFileError(
                "friction_preview_mode: must be 'known' or 'current_only'") from None
        config = replace(config, friction_preview_mode=mode)
    for key in ("duration", "nominal_step_width", "steady_settle_time"):
        if key in doc:
            try:
                config = replace(config, **{key: float(doc[key])})
            except (TypeError, ValueError) as err:
                raise ScenarioFileError(f"{key}: {err}") from None
    try:
        return replace(config)  # re-run validation on the merged document
    except ValueError as err:
        raise ScenarioFileError(str(err)) from None


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise ScenarioFileError(f"{path}:{err.lineno}: {err.msg}") from None
    return scenario_from_dict(doc)
