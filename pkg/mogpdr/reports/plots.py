# mogpdr/reports/plots.py
"""Cost and trajectory figures for a campaign."""
from __future__ import annotations

import logging

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

from mogpdr.geometry.sets import Box  # noqa: E402
from mogpdr.sim.campaign import CampaignResult  # noqa: E402

logger = logging.getLogger(__name__)

__all__ = ["plot_costs", "plot_trajectories"]

COLORS = {"mogp-dr": "tab:blue", "gp-dr": "tab:orange", "robust-tube": "tab:green"}

# stable element ids so reruns produce identical files
plt.rcParams["svg.hashsalt"] = "mogpdr"


def _save(fig: plt.Figure, path: str) -> None:
    fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    logger.info("figure written to %s", path)


def plot_costs(result: CampaignResult, path: str) -> None:
    """Closed-loop cost of every run, one marker series per controller, means dashed."""
    fig, ax = plt.subplots(figsize=(8, 4))
    for name in result.controllers:
        costs = result.costs(name)
        color = COLORS.get(name)
        ax.plot(range(1, costs.size + 1), costs, "o-", ms=3, lw=0.8, color=color, label=name)
        ax.axhline(result.summaries[name].mean_cost, ls="--", lw=1.0, color=color)
    ax.set_xlabel("run")
    ax.set_ylabel("closed-loop cost")
    ax.grid(True, alpha=0.3)
    ax.legend()
    _save(fig, path)


def plot_trajectories(result: CampaignResult, state_box: Box, plane: tuple[int, int], path: str) -> None:
    """Visited states projected onto two state coordinates, with the state constraints drawn."""
    i, j = plane
    names = result.controllers
    fig, axes = plt.subplots(1, len(names), figsize=(4 * len(names), 4), squeeze=False, sharex=True, sharey=True)
    for ax, name in zip(axes[0], names, strict=True):
        ax.add_patch(
            Rectangle(
                (state_box.lower[i], state_box.lower[j]),
                state_box.upper[i] - state_box.lower[i],
                state_box.upper[j] - state_box.lower[j],
                fill=False,
                ec="k",
                lw=1.0,
            )
        )
        for log in result.logs[name]:
            xs = log.states
            if xs.size:
                ax.plot(xs[:, i], xs[:, j], lw=0.6, alpha=0.6, color=COLORS.get(name))
        ax.plot(0.0, 0.0, "k+", ms=8)
        ax.set_title(name)
        ax.set_xlabel(f"x_{i}")
        ax.grid(True, alpha=0.3)
    axes[0][0].set_ylabel(f"x_{j}")
    _save(fig, path)
