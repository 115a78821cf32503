# mogpdr/drcvar/socp.py
"""Worst-case CVaR over a mixture of moment ambiguity sets as a second-order cone program.

For each active component j (weight gamma, mean mu, variance Sigma, support [a, b])
the program carries t, omega (free) and Omega, phi_1, phi_2, varphi_1, varphi_2 (>= 0):

    minimize    eta
    subject to  eps*beta + sum_j gamma_j (t_j + mu_j omega_j + (Sigma_j + mu_j^2) Omega_j) <= 0
                ||(omega + phi_1 - phi_2, Omega - t + b phi_1 - a phi_2)||
                    <= Omega + t - b phi_1 + a phi_2
                ||(omega - 1 + varphi_1 - varphi_2, Omega - t - beta - eta + b varphi_1 - a varphi_2)||
                    <= Omega + t + beta + eta - b varphi_1 + a varphi_2

The cones certify that Omega w^2 + omega w + t is nonnegative on [a, b] and dominates
w - beta - eta there. The optimal eta is sup CVaR_eps(w) over the set; callers obtain
the lower-side offset by passing the mirrored set.

A component with zero variance is a point mass at its mean. Its quadratic certificate
has no attained optimum (Omega grows without bound), so it enters the budget through the
exact term s_j >= max(0, mu_j - beta - eta) instead. Variances between zero and
VARIANCE_FLOOR are raised to the floor, which can only enlarge the ambiguity set.
"""
from __future__ import annotations

import logging

from mogpdr.conic.program import Affine, ConicBuilder, ConicProgram
from mogpdr.conic.solver import SolverStatus, solve_socp
from mogpdr.drcvar.ambiguity import AmbiguitySet, TighteningOffsets, ambiguity_from_prediction
from mogpdr.errors import SolverFailure
from mogpdr.geometry.sets import Box
from mogpdr.mogp.model import MixturePrediction

logger = logging.getLogger(__name__)

__all__ = ["build_cvar_program", "worst_case_cvar_offset", "build_offsets", "VARIANCE_FLOOR", "POINT_MASS_VARIANCE"]

POINT_MASS_VARIANCE = 1e-14
VARIANCE_FLOOR = 1e-8


def build_cvar_program(aset: AmbiguitySet, eps: float) -> ConicProgram:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"risk level must lie in (0, 1), got {eps}")
    b = ConicBuilder()
    eta = Affine.var(b.variable("eta"))
    beta = Affine.var(b.variable("beta"))
    budget = beta * eps
    for j, comp in enumerate(aset.active()):
        if comp.variance <= POINT_MASS_VARIANCE:
            s = Affine.var(b.variable(f"s_{j}", nonneg=True))
            b.less_equal(comp.mean - (s + beta + eta), 0.0)
            budget = budget + s * comp.weight
            continue
        lo, hi = comp.lower, comp.upper
        second_moment = max(comp.variance, VARIANCE_FLOOR) + comp.mean**2
        t = Affine.var(b.variable(f"t_{j}"))
        omega = Affine.var(b.variable(f"omega_{j}"))
        big_omega = Affine.var(b.variable(f"Omega_{j}", nonneg=True))
        p1, p2 = (Affine.var(i) for i in b.variables(f"phi_{j}", 2, nonneg=True))
        q1, q2 = (Affine.var(i) for i in b.variables(f"varphi_{j}", 2, nonneg=True))

        budget = budget + (t + omega * comp.mean + big_omega * second_moment) * comp.weight

        b.soc_affine(
            big_omega + t - p1 * hi + p2 * lo,
            [omega + p1 - p2, big_omega - t + p1 * hi - p2 * lo],
        )
        shift = t + beta + eta
        b.soc_affine(
            big_omega + shift - q1 * hi + q2 * lo,
            [omega - 1.0 + q1 - q2, big_omega - shift + q1 * hi - q2 * lo],
        )
    b.less_equal(budget, 0.0)
    b.minimize(eta)
    return b.build()


def worst_case_cvar_offset(aset: AmbiguitySet, eps: float, tol: float | None = None) -> float:
    """Smallest eta with sup over the ambiguity set of CVaR_eps(w) <= eta."""
    program = build_cvar_program(aset, eps)
    sol = solve_socp(program, tol)
    if sol.status is not SolverStatus.OPTIMAL:
        # a valid ambiguity set always yields a feasible, bounded program
        raise SolverFailure(f"DR-CVaR program ended with status {sol.status.value}", status="NumericalFailure")
    return sol.objective


def build_offsets(pred: MixturePrediction, support: Box, eps: float, tol: float | None = None) -> TighteningOffsets:
    """Per-dimension lower/upper offsets for the first predicted step."""
    if pred.output_dim != support.dim:
        raise ValueError(f"prediction has {pred.output_dim} dimensions, support has {support.dim}")
    lower, upper = [], []
    for d in range(support.dim):
        aset = ambiguity_from_prediction(pred, d, support)
        upper.append(worst_case_cvar_offset(aset, eps, tol))
        lower.append(worst_case_cvar_offset(aset.mirrored(), eps, tol))
    offsets = TighteningOffsets(lower, upper)
    logger.debug("offsets lower=%s upper=%s", offsets.eta_lower, offsets.eta_upper)
    return offsets
