# mogpdr/conic/solver.py
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum

import cvxpy as cp
import numpy as np
import scipy.sparse as sp

from mogpdr.config import settings
from mogpdr.conic.program import ConicProgram

logger = logging.getLogger(__name__)

__all__ = ["SolverStatus", "ConicSolution", "solve_socp", "RESIDUAL_TOL"]

RESIDUAL_TOL = 1e-7


class SolverStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True, eq=False)
class ConicSolution:
    status: SolverStatus
    x: np.ndarray | None
    objective: float
    eq_residual: float = np.inf
    cone_violation: float = np.inf
    solve_time: float = 0.0
    backend_status: str = ""

    @property
    def ok(self) -> bool:
        return self.status is SolverStatus.OPTIMAL


def _selection(indices: np.ndarray, n: int) -> sp.csr_matrix:
    k = indices.size
    return sp.csr_matrix((np.ones(k), (np.arange(k), indices)), shape=(k, n))


def _constraints(p: ConicProgram, x: cp.Variable) -> list[cp.Constraint]:
    n = p.n_vars
    cons: list[cp.Constraint] = []
    if p.n_eq:
        cons.append(p.a_eq @ x == p.b_eq)
    if p.nonneg.size:
        cons.append(_selection(p.nonneg, n) @ x >= 0)
    # cones of equal size share one vectorised SOC constraint
    by_size: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
    for t, idx in p.soc_blocks:
        by_size.setdefault(len(idx), []).append((t, idx))
    for size, group in sorted(by_size.items()):
        t_sel = _selection(np.array([t for t, _ in group]), n)
        if size == 0:
            cons.append(t_sel @ x >= 0)
            continue
        flat = np.array([i for _, idx in group for i in idx])
        body = cp.reshape(_selection(flat, n) @ x, (size, len(group)), order="F")
        cons.append(cp.SOC(t_sel @ x, body, axis=0))
    return cons


def residuals(p: ConicProgram, x: np.ndarray) -> tuple[float, float]:
    """(equality residual, cone violation), both as infinity norms."""
    eq = float(np.max(np.abs(p.a_eq @ x - p.b_eq))) if p.n_eq else 0.0
    viol = 0.0
    if p.nonneg.size:
        viol = max(viol, float(np.max(-x[p.nonneg])))
    for t, idx in p.soc_blocks:
        viol = max(viol, float(np.linalg.norm(x[list(idx)]) - x[t]))
    return eq, max(viol, 0.0)


def solve_socp(p: ConicProgram, tol: float | None = None) -> ConicSolution:
    """Solve a standard-form SOCP through cvxpy with the configured conic backend.

    ``Optimal`` is only reported when the primal point also passes the residual
    and cone checks, scaled to the larger of RESIDUAL_TOL and 100 times the backend
    tolerance; anything the backend flags as optimal but that fails them
    becomes ``NumericalFailure``.
    """
    tol = settings.solver_tol if tol is None else tol
    x = cp.Variable(p.n_vars)
    prob = cp.Problem(cp.Minimize(p.c @ x), _constraints(p, x))
    opts: dict[str, float] = {}
    if settings.solver.upper() == "CLARABEL":
        opts = {"tol_gap_abs": tol, "tol_gap_rel": tol, "tol_feas": tol}
    start = time.perf_counter()
    try:
        prob.solve(solver=settings.solver.upper(), verbose=False, **opts)
    except cp.error.SolverError as e:
        logger.warning("conic backend error: %s", e)
        return ConicSolution(SolverStatus.NUMERICAL_FAILURE, None, np.nan, solve_time=time.perf_counter() - start)
    elapsed = time.perf_counter() - start

    status = prob.status
    if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        return ConicSolution(SolverStatus.INFEASIBLE, None, np.inf, solve_time=elapsed, backend_status=status)
    if status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
        return ConicSolution(SolverStatus.UNBOUNDED, None, -np.inf, solve_time=elapsed, backend_status=status)
    if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE) or x.value is None:
        logger.warning("conic backend returned status %s", status)
        return ConicSolution(SolverStatus.NUMERICAL_FAILURE, None, np.nan, solve_time=elapsed, backend_status=status)

    xv = np.asarray(x.value, dtype=float)
    eq, viol = residuals(p, xv)
    gate = max(RESIDUAL_TOL, 100.0 * tol)
    eq_ok = eq <= gate * (1.0 + (float(np.max(np.abs(p.b_eq))) if p.n_eq else 0.0))
    cone_ok = viol <= gate * (1.0 + float(np.max(np.abs(xv), initial=0.0)))
    if not (eq_ok and cone_ok):
        logger.warning(
            "backend status %s but residuals too large (eq %.2e, cone %.2e)", status, eq, viol
        )
        return ConicSolution(
            SolverStatus.NUMERICAL_FAILURE, xv, float(p.c @ xv), eq, viol, elapsed, backend_status=status
        )
    return ConicSolution(SolverStatus.OPTIMAL, xv, float(p.c @ xv), eq, viol, elapsed, backend_status=status)
