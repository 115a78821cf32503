# mogpdr/drcvar/oracle.py
"""Discretised primal moment problem, used to cross-check the cone program."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize_scalar

from mogpdr.drcvar.ambiguity import AmbiguityComponent, AmbiguitySet
from mogpdr.drcvar.socp import worst_case_cvar_offset
from mogpdr.errors import AmbiguitySetError

logger = logging.getLogger(__name__)

__all__ = ["lp_primal_oracle", "compare_instance", "relative_gap", "OracleComparison", "MIN_GRID_POINTS"]

MIN_GRID_POINTS = 101
_BETA_XATOL = 1e-10


@dataclass(frozen=True)
class OracleComparison:
    socp: float
    oracle: float

    @property
    def gap(self) -> float:
        return relative_gap(self.socp, self.oracle)


def relative_gap(value: float, reference: float) -> float:
    return abs(value - reference) / max(abs(reference), 0.1)


class _ComponentLP:
    """max_p sum_k p_k (xi_k - beta)^+ over probability vectors on the grid with the component's moments."""

    def __init__(self, comp: AmbiguityComponent, grid_points: int) -> None:
        xi = np.linspace(comp.lower, comp.upper, grid_points)
        self.xi = np.unique(np.append(xi, comp.mean))
        self.a_eq = np.vstack([np.ones_like(self.xi), self.xi])
        self.b_eq = np.array([1.0, comp.mean])
        self.a_ub = (self.xi**2).reshape(1, -1)
        self.b_ub = np.array([comp.second_moment])
        self.comp = comp

    def value(self, beta: float) -> float:
        gain = np.maximum(self.xi - beta, 0.0)
        res = linprog(
            -gain, A_ub=self.a_ub, b_ub=self.b_ub, A_eq=self.a_eq, b_eq=self.b_eq, bounds=(0, None), method="highs"
        )
        if res.status == 2:
            raise AmbiguitySetError(
                f"moment problem infeasible: mean {self.comp.mean} / variance {self.comp.variance} "
                f"inconsistent with support [{self.comp.lower}, {self.comp.upper}]"
            )
        if res.status != 0:
            raise RuntimeError(f"oracle LP failed: {res.message}")
        return float(-res.fun)


def lp_primal_oracle(aset: AmbiguitySet, eps: float, grid_points: int = 2001) -> float:
    """Worst-case CVaR_eps by discretising every component's support.

    inf over beta of beta + (1/eps) * sum_j gamma_j * V_j(beta), where V_j is the
    grid LP above. The infimum is searched on [min support, max support] with a
    bounded golden-section/Brent search.
    """
    if grid_points < MIN_GRID_POINTS:
        raise ValueError(f"grid_points must be >= {MIN_GRID_POINTS}, got {grid_points}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"risk level must lie in (0, 1), got {eps}")
    comps = [c for c in aset.components if c.weight > 0.0]
    for c in comps:
        if c.lower > c.upper or not c.lower <= c.mean <= c.upper:
            raise AmbiguitySetError(f"mean {c.mean} outside support [{c.lower}, {c.upper}]; moment problem infeasible")
    lps = [(c.weight, _ComponentLP(c, grid_points)) for c in comps]

    def objective(beta: float) -> float:
        return beta + sum(w * lp.value(beta) for w, lp in lps) / eps

    lo, hi = min(c.lower for c in comps), max(c.upper for c in comps)
    if hi - lo <= _BETA_XATOL:
        return objective(lo)
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": _BETA_XATOL})
    # the bounded search never evaluates the endpoints themselves
    return float(min(res.fun, objective(lo), objective(hi)))


def compare_instance(
    aset: AmbiguitySet, eps: float, grid_points: int = 2001, tol: float | None = None
) -> OracleComparison:
    """Cone-program offset next to the discretised oracle for one ambiguity set."""
    problems = [p for c in aset.components for p in c.problems()]
    if problems:
        raise AmbiguitySetError("invalid ambiguity set: " + "; ".join(problems))
    return OracleComparison(worst_case_cvar_offset(aset, eps, tol), lp_primal_oracle(aset, eps, grid_points))
