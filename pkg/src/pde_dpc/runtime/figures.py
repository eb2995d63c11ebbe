"""Per-scenario SVG panels: state overlays, control traces, objective over time."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..control.loss import curvature_density  # noqa: E402
from ..numerics.grid import Grid1D  # noqa: E402
from .evaluation import ScenarioRun  # noqa: E402

PALETTE = {
    "natural": "#7f7f7f",
    "tidon": "#1f77b4",
    "fdm": "#d62728",
    "target": "#2ca02c",
    "initial": "#000000",
}


def render_scenario(path: str | Path, run: ScenarioRun, grid: Grid1D, cost: str) -> Path:
    """Three panels: fields at t=0 and t=T, amplitude traces, running objective."""
    if run.natural is None or run.ctrl_tidon is None or run.ctrl_fdm is None:
        raise ValueError(f"Scenario {run.record.index} has no trajectories to plot")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    x = grid.x

    fig, (ax_state, ax_ctrl, ax_cost) = plt.subplots(1, 3, figsize=(15, 4))

    ax_state.plot(x, run.natural.initial, color=PALETTE["initial"], linestyle=":", label="initial")
    ax_state.plot(x, run.natural.terminal, color=PALETTE["natural"], label="natural (FDM)")
    ax_state.plot(x, run.ctrl_tidon.terminal, color=PALETTE["tidon"], linestyle="--", label="controlled (TI-DON)")
    ax_state.plot(x, run.ctrl_fdm.terminal, color=PALETTE["fdm"], label="controlled (FDM)")
    if run.scen is not None and run.scen.target is not None:
        ax_state.plot(x, np.asarray(run.scen.target).reshape(-1), color=PALETTE["target"], linewidth=2.0, alpha=0.6, label="target")
    ax_state.set_xlabel("x")
    ax_state.set_ylabel("u(x, T)")
    ax_state.legend(fontsize="small")
    ax_state.grid(True, linestyle="--", alpha=0.6)

    t = np.arange(run.ctrl_fdm.n_steps) * run.ctrl_fdm.dt
    for i in range(run.ctrl_fdm.amplitudes.shape[1]):
        ax_ctrl.step(t, run.ctrl_fdm.amplitudes[:, i], where="post", label=f"f_{i + 1}")
    ax_ctrl.axhline(0, color="k", linewidth=0.8, alpha=0.7)
    ax_ctrl.set_xlabel("t")
    ax_ctrl.set_ylabel("amplitude")
    ax_ctrl.legend(fontsize="small")
    ax_ctrl.grid(True, linestyle="--", alpha=0.6)

    times = np.arange(run.natural.fields.shape[0]) * run.natural.dt
    target = None
    if run.scen is not None and run.scen.target is not None:
        target = np.asarray(run.scen.target, dtype=np.float64).reshape(1, -1)
    ylabel = "∫ (∂²u/∂x²)² dx" if cost == "curvature_integral" else "‖u − u_target‖²"
    if cost != "curvature_integral" and target is None:
        ax_cost.text(0.5, 0.5, "no target", ha="center", va="center", transform=ax_cost.transAxes)
    else:
        for name, traj in (("natural", run.natural), ("tidon", run.ctrl_tidon), ("fdm", run.ctrl_fdm)):
            if cost == "curvature_integral":
                series = curvature_density(traj.fields, grid)
            else:
                series = np.sum((traj.fields - target) ** 2, axis=1) * grid.dx
            ax_cost.plot(times, series, color=PALETTE[name], label=name)
        ax_cost.legend(fontsize="small")
    ax_cost.set_xlabel("t")
    ax_cost.set_ylabel(ylabel)
    ax_cost.grid(True, linestyle="--", alpha=0.6)

    fig.suptitle(f"scenario {run.record.index}")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path
