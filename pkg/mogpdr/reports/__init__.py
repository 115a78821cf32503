from mogpdr.reports.plots import plot_costs, plot_trajectories
from mogpdr.reports.report import render_report, write_report

__all__ = ["plot_costs", "plot_trajectories", "render_report", "write_report"]
