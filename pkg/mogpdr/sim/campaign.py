# mogpdr/sim/campaign.py
"""Monte Carlo campaigns with paired seeds across controllers."""
from __future__ import annotations

import logging
from collections.abc import Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from mogpdr.config import settings
from mogpdr.mpc.models import ControllerKind, ControllerState, SystemModel
from mogpdr.sim.disturbance import DisturbanceSpec
from mogpdr.sim.harness import TrajectoryLog, run_closed_loop

logger = logging.getLogger(__name__)

__all__ = ["ControllerSummary", "CampaignResult", "run_campaign", "summarize"]


@dataclass(frozen=True)
class ControllerSummary:
    controller: str
    runs: int
    mean_cost: float
    median_cost: float
    std_cost: float
    violation_rate: float
    infeasible_steps: int
    fallback_steps: int
    aborted_runs: int
    input_violations: int
    mean_solve_time: float


@dataclass
class CampaignResult:
    logs: dict[str, list[TrajectoryLog]] = field(default_factory=dict)
    summaries: dict[str, ControllerSummary] = field(default_factory=dict)

    @property
    def controllers(self) -> list[str]:
        return list(self.logs)

    def costs(self, controller: str) -> np.ndarray:
        return np.array([log.total_cost for log in self.logs[controller]])

    def reduction(self, controller: str, reference: str) -> float:
        """Relative mean-cost reduction of ``controller`` against ``reference``, in percent."""
        ref = self.summaries[reference].mean_cost
        if ref == 0.0:
            return 0.0
        return 100.0 * (ref - self.summaries[controller].mean_cost) / ref


def summarize(controller: str, logs: list[TrajectoryLog]) -> ControllerSummary:
    costs = np.array([log.total_cost for log in logs])
    steps = sum(log.length for log in logs)
    times = [r.solve_time for log in logs for r in log.records]
    return ControllerSummary(
        controller=controller,
        runs=len(logs),
        mean_cost=float(np.mean(costs)),
        median_cost=float(np.median(costs)),
        std_cost=float(np.std(costs)),
        violation_rate=sum(log.violations for log in logs) / steps if steps else 0.0,
        infeasible_steps=sum(log.infeasible_steps for log in logs),
        fallback_steps=sum(log.fallback_steps for log in logs),
        aborted_runs=sum(1 for log in logs if log.aborted),
        input_violations=sum(log.input_violations for log in logs),
        mean_solve_time=float(np.mean(times)) if times else 0.0,
    )


def _run_one(
    args: tuple[ControllerState, SystemModel, DisturbanceSpec, np.ndarray, int, int, bool],
) -> TrajectoryLog:
    ctrl, sys, spec, x0, steps, seed, audit = args
    return run_closed_loop(ctrl, sys, spec, x0, steps, seed, audit=audit)


def run_campaign(
    controllers: Mapping[ControllerKind | str, ControllerState],
    sys: SystemModel,
    spec: DisturbanceSpec,
    x0: np.ndarray,
    steps: int,
    n_runs: int,
    base_seed: int,
    *,
    audit_runs: int = 0,
    workers: int | None = None,
) -> CampaignResult:
    """Run r of every controller uses seed base_seed + r; the first ``audit_runs`` runs audit the shifted plan."""
    if n_runs < 1:
        raise ValueError("a campaign needs at least one run")
    workers = settings.workers if workers is None else workers
    x0 = np.asarray(x0, dtype=float)
    result = CampaignResult()
    for key, ctrl in controllers.items():
        name = ControllerKind(key).value
        tasks = [(ctrl, sys, spec, x0, steps, base_seed + r, r < audit_runs) for r in range(n_runs)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                logs = list(pool.map(_run_one, tasks))
        else:
            logs = [_run_one(t) for t in tasks]
        summary = summarize(name, logs)
        result.logs[name] = logs
        result.summaries[name] = summary
        logger.info(
            "%s: %d runs, mean cost %.3f (median %.3f, std %.3f), violation rate %.3f, infeasible %d, aborted %d",
            name,
            summary.runs,
            summary.mean_cost,
            summary.median_cost,
            summary.std_cost,
            summary.violation_rate,
            summary.infeasible_steps,
            summary.aborted_runs,
        )
    return result
