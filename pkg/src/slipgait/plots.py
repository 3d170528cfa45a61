"""Figure rendering for trajectory logs.

All figures are written as SVG with a fixed id salt and no timestamp
metadata, so rendering the same CSV twice gives byte-identical files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

from .lipm import GaitParams
from .simulation import ScenarioConfig

PLOT_KINDS = ("velocity", "rcof", "footprint")

_SVG_SALT = "slipgait"


def _save(fig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _new_axes(xlabel: str, ylabel: str):
    fig, ax = plt.subplots(figsize=(8.0, 4.0), dpi=100)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, alpha=0.4)
    return fig, ax


def stance_sequence(columns: dict) -> list:
    """Consecutive stance placements (x, y, side) from the log columns."""
    feet = []
    for x, y, side in zip(columns["foot_x"], columns["foot_y"], columns["side"]):
        entry = (float(x), float(y), side)
        if not feet or feet[-1] != entry:
            feet.append(entry)
    return feet


def render_velocity(columns: dict, out_path, config: ScenarioConfig | None = None) -> None:
    """Sagittal CoM velocity over time, with the command when available."""
    fig, ax = _new_axes("time [s]", "walking velocity [m/s]")
    if config is not None:
        desired = [config.velocity_schedule.at(t) for t in columns["t"]]
        ax.step(columns["t"], desired, where="post", color="tab:red",
                linestyle="--", label="desired")
    ax.plot(columns["t"], columns["dx"], color="tab:blue", label="actual")
    ax.legend(loc="best")
    _save(fig, out_path)


def render_rcof(columns: dict, out_path, config: ScenarioConfig | None = None) -> None:
    """Required friction per axis with the pyramid bound in force."""
    fig, ax = _new_axes("time [s]", "required coefficient of friction")
    t = columns["t"]
    ax.plot(t, columns["rcof_x"], color="tab:blue", label="sagittal")
    ax.plot(t, columns["rcof_y"], color="tab:green", label="lateral")
    ax.step(t, columns["mu_ap"], where="post", color="tab:red",
            linestyle="--", label="bound")
    ax.step(t, -columns["mu_ap"], where="post", color="tab:red", linestyle="--")
    ax.legend(loc="best")
    _save(fig, out_path)


def render_footprint(columns: dict, out_path, config: ScenarioConfig | None = None) -> None:
    """Top-down view: stance rectangles, CoM path and ZMP path."""
    params = config.params if config is not None else GaitParams()
    a, b = params.foot_length_a, params.foot_width_b
    fig, ax = _new_axes("x [m]", "y [m]")
    for x, y, side in stance_sequence(columns):
        color = "tab:blue" if side == "L" else "tab:green"
        ax.add_patch(Rectangle((x - a / 2.0, y - b / 2.0), a, b,
                               fill=False, edgecolor=color, linewidth=1.2))
    ax.plot(columns["zx"], columns["zy"], color="tab:red", linewidth=0.9,
            label="ZMP")
    ax.plot(columns["x"], columns["y"], color="black", linewidth=1.2,
            label="CoM")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best")
    _save(fig, out_path)


_RENDERERS = {
    "velocity": render_velocity,
    "rcof": render_rcof,
    "footprint": render_footprint,
}


def render(kind: str, columns: dict, out_path,
           config: ScenarioConfig | None = None) -> None:
    if kind not in _RENDERERS:
        raise ValueError(f"unknown plot kind {kind!r} (choose from {PLOT_KINDS})")
    _RENDERERS[kind](columns, out_path, config)


def render_sweep_summary(entries: list, weight_name: str, out_path) -> None:
    """Steady velocity and steady friction demand across a weight grid."""
    ok = [e for e in entries if e.get("status") == "ok"]
    fig, ax = _new_axes(f"{weight_name} weight", "steady velocity [m/s]")
    ax2 = ax.twinx()
    ax2.set_ylabel("steady max required friction")
    if ok:
        values = [e["value"] for e in ok]
        ax.plot(values, [e["steady_velocity_mean"] for e in ok],
                marker="o", color="tab:blue", label="velocity")
        ax2.plot(values, [e["max_rcof_steady"] for e in ok],
                 marker="s", color="tab:red", label="required friction")
    lines = ax.get_lines() + ax2.get_lines()
    if lines:
        ax.legend(lines, [ln.get_label() for ln in lines], loc="best")
    _save(fig, out_path)
