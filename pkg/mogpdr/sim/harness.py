# mogpdr/sim/harness.py
"""Closed-loop simulation of one controller against the true disturbance law."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from mogpdr.conic.solver import SolverStatus
from mogpdr.errors import SolverFailure
from mogpdr.geometry.sets import Box
from mogpdr.mogp.gating import GatingParams
from mogpdr.mogp.gp import KernelParams
from mogpdr.mogp.model import Dataset, MoGPModel
from mogpdr.mogp.training import train_single_gp
from mogpdr.mpc.controller import Candidate, check_candidate, setup_controller, shifted_candidate, solve_step
from mogpdr.mpc.models import ControllerKind, ControllerState, MPCConfig, SystemModel
from mogpdr.sim.disturbance import DisturbanceSpec, sample_disturbance

logger = logging.getLogger(__name__)

__all__ = [
    "StepRecord",
    "TrajectoryLog",
    "run_closed_loop",
    "build_baselines",
    "build_controllers",
    "STATE_TOL",
]

STATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class StepRecord:
    step: int
    x: np.ndarray
    s0: np.ndarray  # NaN when the step fell back
    u: np.ndarray
    w: np.ndarray
    stage_cost: float
    eta_lower: np.ndarray  # NaN for the robust tube
    eta_upper: np.ndarray
    status: SolverStatus
    fallback: bool
    objective: float
    solve_time: float


@dataclass(eq=False)
class TrajectoryLog:
    controller: str
    seed: int
    records: list[StepRecord] = field(default_factory=list)
    final_state: np.ndarray | None = None
    violations: int = 0
    input_violations: int = 0
    abort_reason: str | None = None
    audit_failures: list[tuple[int, list[str]]] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.records)

    @property
    def total_cost(self) -> float:
        return float(sum(r.stage_cost for r in self.records))

    @property
    def infeasible_steps(self) -> int:
        return sum(1 for r in self.records if r.status is not SolverStatus.OPTIMAL)

    @property
    def fallback_steps(self) -> int:
        return sum(1 for r in self.records if r.fallback)

    @property
    def aborted(self) -> bool:
        return self.abort_reason is not None

    @property
    def feasible(self) -> bool:
        return not self.aborted and self.infeasible_steps == 0

    @property
    def states(self) -> np.ndarray:
        """x_0 .. x_T (one row more than records when the run completed)."""
        xs = [r.x for r in self.records]
        if self.final_state is not None:
            xs.append(self.final_state)
        return np.vstack(xs) if xs else np.empty((0, 0))

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])


def _stage_cost(ctrl: ControllerState, x: np.ndarray, u: np.ndarray) -> float:
    return float(x @ ctrl.config.q_matrix @ x + u @ ctrl.config.r_matrix @ u)


def run_closed_loop(
    ctrl: ControllerState,
    sys: SystemModel,
    spec: DisturbanceSpec,
    x0: np.ndarray,
    steps: int,
    seed: int,
    *,
    audit: bool = False,
) -> TrajectoryLog:
    """Solve, apply, disturb, repeat.

    An infeasible step applies the previous plan shifted forward, K (x - s_1) + v_1,
    and counts as a fallback. A numerical failure ends the run with a partial log.
    """
    rng = np.random.default_rng(seed)
    n = sys.n
    nan_n = np.full(n, np.nan)
    log = TrajectoryLog(controller=ctrl.kind.value, seed=seed)
    x = np.asarray(x0, dtype=float).copy()
    plan: Candidate | None = None

    for t in range(steps):
        try:
            sol = solve_step(ctrl, x)
        except SolverFailure as e:
            log.abort_reason = f"step {t}: tightening offsets failed ({e})"
            logger.warning("run seed=%d %s: %s", seed, ctrl.kind.value, log.abort_reason)
            break

        if sol.status is SolverStatus.NUMERICAL_FAILURE:
            log.abort_reason = f"step {t}: solver numerical failure"
            logger.warning("run seed=%d %s: %s", seed, ctrl.kind.value, log.abort_reason)
            break

        if audit and plan is not None:
            failed = check_candidate(ctrl, x, plan, sol.offsets)
            if failed:
                log.audit_failures.append((t, failed))
                logger.warning("step %d: shifted candidate violates %s", t, ", ".join(failed))

        if sol.ok:
            assert sol.u is not None and sol.s is not None
            u, s0, fallback = sol.u, sol.s[0], False
            plan = shifted_candidate(ctrl, sol)
        elif plan is not None:
            u = ctrl.k_gain @ (x - plan.s[0]) + plan.v[0]
            s0, fallback = nan_n, True
            plan = shifted_candidate(ctrl, plan)
            logger.warning(
                "step %d: %s step %s, applying the shifted previous plan", t, ctrl.kind.value, sol.status.value
            )
        else:
            log.abort_reason = f"step {t}: {sol.status.value} with no previous plan to fall back on"
            logger.warning("run seed=%d %s: %s", seed, ctrl.kind.value, log.abort_reason)
            break

        w = sample_disturbance(spec, x, rng)
        if not sys.input_set.contains(u, STATE_TOL):
            log.input_violations += 1
        offsets = sol.offsets
        log.records.append(
            StepRecord(
                step=t,
                x=x,
                s0=np.asarray(s0, dtype=float),
                u=np.asarray(u, dtype=float),
                w=w,
                stage_cost=_stage_cost(ctrl, x, u),
                eta_lower=offsets.eta_lower if offsets is not None else nan_n,
                eta_upper=offsets.eta_upper if offsets is not None else nan_n,
                status=sol.status,
                fallback=fallback,
                objective=sol.objective,
                solve_time=sol.solve_time,
            )
        )
        x = sys.step(x, u, w)
        if not sys.state_box.contains(x, STATE_TOL):
            log.violations += 1

    if not log.aborted:
        log.final_state = x
    return log


# ---- Controllers ----


def build_baselines(
    sys: SystemModel,
    cfg: MPCConfig,
    data: Dataset,
    kernel_init: KernelParams,
    gating: GatingParams | None = None,
    *,
    support: Box | None = None,
    base: ControllerState | None = None,
) -> dict[ControllerKind, ControllerState]:
    """GP-DR (one GP per dimension on the same data) and the robust tube.

    Gain, tube and terminal set come from ``base`` when given, so all controllers share them.
    """
    gp_model = train_single_gp(data, kernel_init, gating, support=support if support is not None else sys.support)
    if base is None:
        base = setup_controller(sys, cfg, kind=ControllerKind.ROBUST_TUBE)
    return {
        ControllerKind.GP_DR: replace(base, kind=ControllerKind.GP_DR, model=gp_model),
        ControllerKind.ROBUST_TUBE: replace(base, kind=ControllerKind.ROBUST_TUBE, model=None),
    }


def build_controllers(
    sys: SystemModel,
    cfg: MPCConfig,
    model: MoGPModel,
    data: Dataset,
    kernel_init: KernelParams,
    gating: GatingParams | None = None,
) -> dict[ControllerKind, ControllerState]:
    """The proposed controller plus both baselines, in comparison order."""
    mogp = setup_controller(sys, cfg, model, ControllerKind.MOGP_DR)
    baselines = build_baselines(sys, cfg, data, kernel_init, gating, support=model.support, base=mogp)
    return {ControllerKind.MOGP_DR: mogp, **baselines}
