# mogpdr/mpc/controller.py
"""Tube MPC with a distributionally robust first-step state constraint."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass

import numpy as np

from mogpdr.conic.program import Affine, ConicBuilder, ConicProgram
from mogpdr.conic.solver import SolverStatus, solve_socp
from mogpdr.drcvar.ambiguity import TighteningOffsets
from mogpdr.drcvar.socp import build_offsets
from mogpdr.errors import ConfigError, ContractViolation, EmptySetError
from mogpdr.geometry.invariant import ClosedLoopMatrix, mrpi_approx, terminal_set
from mogpdr.geometry.sets import Polytope, pontryagin_diff
from mogpdr.mogp.model import MoGPModel, predict_mixture
from mogpdr.mpc.models import ControllerKind, ControllerState, MPCConfig, StepSolution, SystemModel
from mogpdr.mpc.riccati import riccati_gain

logger = logging.getLogger(__name__)

__all__ = [
    "setup_controller",
    "solve_step",
    "control_law",
    "step_offsets",
    "Candidate",
    "shifted_candidate",
    "check_candidate",
]

CANDIDATE_TOL = 1e-6


def setup_controller(
    sys: SystemModel,
    cfg: MPCConfig,
    model: MoGPModel | None = None,
    kind: ControllerKind = ControllerKind.MOGP_DR,
) -> ControllerState:
    """Offline part: gain, tube, tightened sets and terminal set."""
    kind = ControllerKind(kind)
    if kind.uses_model and model is None:
        raise ConfigError(f"controller '{kind.value}' needs a trained disturbance model")
    if model is not None and model.output_dim != sys.n:
        raise ConfigError(f"model predicts {model.output_dim} outputs, system has {sys.n} states")

    k, p_ric = riccati_gain(sys, cfg.q_matrix, cfg.r_matrix)
    p_term = cfg.p_matrix if cfg.p_matrix is not None else p_ric
    a_cl = ClosedLoopMatrix.from_gain(sys.a, sys.b, k)

    z_set = mrpi_approx(a_cl, sys.support, cfg.mrpi_eps, extra_directions=k)
    z_trivial = sys.support.is_point and bool(np.all(sys.support.lower == 0.0))

    x_tight = pontryagin_diff(sys.state_box, z_set)
    if x_tight.empty:
        logger.error("X (-) Z is empty: the disturbance tube does not fit inside the state constraints")
        raise EmptySetError("X (-) Z", "disturbance support too large for the state constraints")
    u_tight = pontryagin_diff(sys.input_set, z_set, transform=k)
    if u_tight.empty:
        logger.error("U (-) KZ is empty: tube feedback exhausts the input constraints")
        raise EmptySetError("U (-) KZ", "tube feedback exhausts the input constraints")
    if cfg.constraint_backoff > 0.0:
        u_tight = Polytope(u_tight.normals, u_tight.offsets - cfg.constraint_backoff)

    terminal = terminal_set(a_cl, k, x_tight, u_tight)
    if terminal.polytope.is_empty() or not terminal.polytope.contains(np.zeros(sys.n)):
        logger.error("terminal set is empty or excludes the origin")
        raise EmptySetError("X_f", "no invariant terminal region inside the tightened constraints")

    logger.info(
        "%s controller ready: rho(A+BK)=%.4f, Z facets=%d, X_f facets=%d (converged=%s)",
        kind.value,
        a_cl.spectral_radius,
        z_set.n_facets,
        terminal.polytope.n_facets,
        terminal.converged,
    )
    return ControllerState(
        system=sys,
        config=cfg,
        kind=kind,
        k_gain=k,
        p_terminal=p_term,
        closed_loop=a_cl,
        z_set=z_set,
        z_trivial=z_trivial,
        x_tight=x_tight,
        u_tight=u_tight,
        terminal=terminal,
        model=model if kind.uses_model else None,
    )


def step_offsets(ctrl: ControllerState, x_t: np.ndarray) -> TighteningOffsets | None:
    """DR-CVaR offsets at x_t; None for the robust tube, which tightens every step by Z."""
    if not ctrl.kind.uses_model:
        return None
    assert ctrl.model is not None
    pred = predict_mixture(ctrl.model, x_t)
    return build_offsets(pred, ctrl.system.support, ctrl.config.risk, ctrl.config.solver_tol)


def _upper_chol(m: np.ndarray) -> np.ndarray:
    return np.linalg.cholesky(m).T


def build_step_program(ctrl: ControllerState, x_t: np.ndarray, offsets: TighteningOffsets | None) -> ConicProgram:
    sys, cfg = ctrl.system, ctrl.config
    n, m, horizon = sys.n, sys.m, cfg.horizon
    a_cl = ctrl.closed_loop.a_cl
    x_t = np.asarray(x_t, dtype=float)

    b = ConicBuilder()
    s_idx = b.variables("s", (horizon + 1) * n).reshape(horizon + 1, n)
    v_idx = b.variables("v", horizon * m).reshape(horizon, m)
    t = b.variable("cost_t")

    # initial tube membership: x_t - s_0 in Z
    if ctrl.z_trivial:
        b.equal_rows(np.eye(n), s_idx[0], x_t)
    else:
        hz, gz = ctrl.z_set.normals, ctrl.z_set.offsets
        b.less_equal_rows(-hz, s_idx[0], gz - hz @ x_t)

    # nominal dynamics
    dyn = np.hstack([sys.a, sys.b, -np.eye(n)])
    for k in range(horizon):
        b.equal_rows(dyn, np.concatenate([s_idx[k], v_idx[k], s_idx[k + 1]]), np.zeros(n))

    # first predicted step
    if offsets is not None:
        lo = sys.state_box.lower + offsets.eta_lower
        up = sys.state_box.upper - offsets.eta_upper
        first = np.hstack([np.eye(n), -a_cl])
        idx = np.concatenate([s_idx[1], s_idx[0]])
        drift = a_cl @ x_t
        b.less_equal_rows(first, idx, up - drift)
        b.less_equal_rows(-first, idx, drift - lo)
    else:
        b.less_equal_rows(ctrl.x_tight.normals, s_idx[1], ctrl.x_tight.offsets)

    # steps 2..N-1 use the tube tightening
    for k in range(2, horizon):
        b.less_equal_rows(ctrl.x_tight.normals, s_idx[k], ctrl.x_tight.offsets)

    for k in range(horizon):
        b.less_equal_rows(ctrl.u_tight.normals, v_idx[k], ctrl.u_tight.offsets)

    xf = ctrl.terminal.polytope
    b.less_equal_rows(xf.normals, s_idx[horizon], xf.offsets)

    # quadratic cost as ||L z|| <= t
    uq, ur, up_ = _upper_chol(cfg.q_matrix), _upper_chol(cfg.r_matrix), _upper_chol(ctrl.p_terminal)
    stacked: list[Affine] = []
    for k in range(horizon):
        stacked += [Affine.dot(row, s_idx[k]) for row in uq]
        stacked += [Affine.dot(row, v_idx[k]) for row in ur]
    stacked += [Affine.dot(row, s_idx[horizon]) for row in up_]
    b.soc_affine(Affine.var(t), stacked)
    b.minimize(Affine.var(t))
    return b.build()


def solve_step(ctrl: ControllerState, x_t: np.ndarray) -> StepSolution:
    """Online part: offsets at x_t, one conic program, tube feedback on the first input."""
    x_t = np.asarray(x_t, dtype=float)
    start = time.perf_counter()
    offsets = step_offsets(ctrl, x_t)
    program = build_step_program(ctrl, x_t, offsets)
    sol = solve_socp(program, ctrl.config.solver_tol)
    elapsed = time.perf_counter() - start
    if sol.status is not SolverStatus.OPTIMAL or sol.x is None:
        return StepSolution(sol.status, None, None, None, offsets, float("nan"), elapsed)

    n, m, horizon = ctrl.system.n, ctrl.system.m, ctrl.horizon
    s = program.block(sol.x, "s").reshape(horizon + 1, n)
    v = program.block(sol.x, "v").reshape(horizon, m)
    if ctrl.z_trivial:
        s[0] = x_t
    cost = float(program.block(sol.x, "cost_t")[0]) ** 2
    partial = StepSolution(SolverStatus.OPTIMAL, s, v, None, offsets, cost, elapsed)
    u = control_law(partial, x_t, ctrl.k_gain)
    return StepSolution(SolverStatus.OPTIMAL, s, v, u, offsets, cost, elapsed)


def control_law(sol: StepSolution, x_t: np.ndarray, k_gain: np.ndarray) -> np.ndarray:
    """u = K (x_t - s_0*) + v_0*."""
    if sol.status is not SolverStatus.OPTIMAL or sol.s is None or sol.v is None:
        raise ContractViolation(f"control law applied to a step with status {sol.status.value}")
    return np.atleast_2d(k_gain) @ (np.asarray(x_t, dtype=float) - sol.s[0]) + sol.v[0]


# ---- Recursive-feasibility audit ----


@dataclass(frozen=True, eq=False)
class Candidate:
    s: np.ndarray  # (N+1, n)
    v: np.ndarray  # (N, m)


def shifted_candidate(ctrl: ControllerState, prev: StepSolution | Candidate) -> Candidate:
    """[s_1, ..., s_N, A_cl s_N] driven by [v_1, ..., v_{N-1}, K s_N]."""
    if prev.s is None or prev.v is None:
        raise ContractViolation("shifted candidate needs an optimal previous solution")
    s_n = prev.s[-1]
    s = np.vstack([prev.s[1:], ctrl.closed_loop.a_cl @ s_n])
    v = np.vstack([prev.v[1:], ctrl.k_gain @ s_n])
    return Candidate(s, v)


def check_candidate(
    ctrl: ControllerState,
    x_next: np.ndarray,
    cand: Candidate,
    offsets: TighteningOffsets | None,
    tol: float = CANDIDATE_TOL,
) -> list[str]:
    """Names of the step-program constraints the candidate violates at x_next (empty list = feasible)."""
    sys, horizon = ctrl.system, ctrl.horizon
    a_cl = ctrl.closed_loop.a_cl
    failed: list[str] = []
    if not ctrl.z_set.contains(x_next - cand.s[0], tol):
        failed.append("initial tube")
    for k in range(horizon):
        if np.max(np.abs(sys.a @ cand.s[k] + sys.b @ cand.v[k] - cand.s[k + 1])) > tol:
            failed.append(f"dynamics k={k}")
    if offsets is not None:
        y = cand.s[1] + a_cl @ (x_next - cand.s[0])
        lo = sys.state_box.lower + offsets.eta_lower
        up = sys.state_box.upper - offsets.eta_upper
        if np.any(y < lo - tol) or np.any(y > up + tol):
            failed.append("first-step DR-CVaR")
    elif not ctrl.x_tight.contains(cand.s[1], tol):
        failed.append("first-step tube")
    for k in range(2, horizon):
        if not ctrl.x_tight.contains(cand.s[k], tol):
            failed.append(f"state k={k}")
    for k in range(horizon):
        if not ctrl.u_tight.contains(cand.v[k], tol):
            failed.append(f"input k={k}")
    if not ctrl.terminal.polytope.contains(cand.s[horizon], tol):
        failed.append("terminal")
    return failed
