# mogpdr/reports/report.py
from __future__ import annotations

import logging
import os
from dataclasses import asdict

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from mogpdr.sim.campaign import CampaignResult

logger = logging.getLogger(__name__)

__all__ = ["render_report", "write_report"]

TEMPLATE_DIR = os.path.join(os.path.dirname(__file__), "templates")

_env = Environment(loader=FileSystemLoader(TEMPLATE_DIR), undefined=StrictUndefined, keep_trailing_newline=True)


def render_report(
    result: CampaignResult,
    *,
    name: str,
    steps: int,
    base_seed: int,
    risk: float,
    reference: str = "robust-tube",
) -> str:
    """Markdown summary table; reductions are relative to ``reference`` (or the last controller if absent)."""
    if reference not in result.summaries:
        reference = result.controllers[-1]
    rows = [dict(asdict(s), reduction=result.reduction(s.controller, reference)) for s in result.summaries.values()]
    best = min(rows, key=lambda r: r["mean_cost"])["controller"] if len(rows) > 1 else None
    return _env.get_template("report.md.j2").render(
        name=name,
        runs=max(s.runs for s in result.summaries.values()),
        steps=steps,
        base_seed=base_seed,
        risk=risk,
        reference=reference,
        rows=rows,
        best=best,
        all_feasible=all(s.infeasible_steps == 0 and s.aborted_runs == 0 for s in result.summaries.values()),
    )


def write_report(result: CampaignResult, path: str, *, name: str, steps: int, base_seed: int, risk: float) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(render_report(result, name=name, steps=steps, base_seed=base_seed, risk=risk))
    logger.info("report written to %s", path)
