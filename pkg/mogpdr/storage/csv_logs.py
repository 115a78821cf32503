# mogpdr/storage/csv_logs.py
"""CSV exports of trajectories and campaign summaries (fixed column order)."""
from __future__ import annotations

import csv
import logging
import os

from mogpdr.sim.campaign import CampaignResult, ControllerSummary
from mogpdr.sim.harness import TrajectoryLog

logger = logging.getLogger(__name__)

__all__ = [
    "SUMMARY_COLUMNS",
    "TIMING_COLUMNS",
    "trajectory_columns",
    "trajectory_path",
    "write_trajectory",
    "write_summary",
    "write_timing",
    "write_campaign",
]

SUMMARY_COLUMNS = [
    "controller",
    "runs",
    "mean_cost",
    "median_cost",
    "std_cost",
    "violation_rate",
    "infeasible_steps",
    "fallback_steps",
    "aborted_runs",
]
TIMING_COLUMNS = ["controller", "mean_solve_time_s"]


def _fmt(v: float) -> str:
    return repr(float(v))


def trajectory_columns(n: int, m: int) -> list[str]:
    cols = ["step"]
    cols += [f"x_{i}" for i in range(n)]
    cols += [f"s0_{i}" for i in range(n)]
    cols += [f"u_{i}" for i in range(m)]
    cols += [f"w_{i}" for i in range(n)]
    cols += ["stage_cost"]
    cols += [f"eta_lo_{i}" for i in range(n)]
    cols += [f"eta_up_{i}" for i in range(n)]
    cols += ["status", "fallback", "objective"]
    return cols


def trajectory_path(out_dir: str, controller: str, run: int) -> str:
    return os.path.join(out_dir, f"trajectory_{controller}_run{run}.csv")


def write_trajectory(log: TrajectoryLog, path: str, n: int, m: int) -> None:
    """One row per applied step; solve times go to timing.csv so this file stays byte-stable."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(trajectory_columns(n, m))
        for r in log.records:
            row: list[str | int] = [r.step]
            row += [_fmt(v) for v in r.x]
            row += [_fmt(v) for v in r.s0]
            row += [_fmt(v) for v in r.u]
            row += [_fmt(v) for v in r.w]
            row += [_fmt(r.stage_cost)]
            row += [_fmt(v) for v in r.eta_lower]
            row += [_fmt(v) for v in r.eta_upper]
            row += [r.status.value, int(r.fallback), _fmt(r.objective)]
            w.writerow(row)


def _summary_row(s: ControllerSummary) -> list[str | int]:
    return [
        s.controller,
        s.runs,
        _fmt(s.mean_cost),
        _fmt(s.median_cost),
        _fmt(s.std_cost),
        _fmt(s.violation_rate),
        s.infeasible_steps,
        s.fallback_steps,
        s.aborted_runs,
    ]


def write_summary(result: CampaignResult, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for s in result.summaries.values():
            w.writerow(_summary_row(s))


def write_timing(result: CampaignResult, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TIMING_COLUMNS)
        for s in result.summaries.values():
            w.writerow([s.controller, f"{s.mean_solve_time:.6f}"])


def write_campaign(result: CampaignResult, out_dir: str, n: int, m: int) -> list[str]:
    """Every trajectory plus summary.csv and timing.csv; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for controller, logs in result.logs.items():
        for run, log in enumerate(logs):
            path = trajectory_path(out_dir, controller, run)
            write_trajectory(log, path, n, m)
            paths.append(path)
    summary = os.path.join(out_dir, "summary.csv")
    write_summary(result, summary)
    timing = os.path.join(out_dir, "timing.csv")
    write_timing(result, timing)
    logger.info("wrote %d trajectory files, %s and %s", len(paths), summary, timing)
    return paths + [summary, timing]
