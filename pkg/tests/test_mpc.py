import dataclasses

import numpy as np
import pytest
from scipy.linalg import block_diag

from mogpdr.conic.solver import SolverStatus
from mogpdr.errors import ConfigError, ContractViolation, EmptySetError
from mogpdr.geometry.sets import Box
from mogpdr.mogp.model import Dataset
from mogpdr.mogp.training import train_mogp
from mogpdr.mpc.controller import check_candidate, control_law, setup_controller, shifted_candidate, solve_step
from mogpdr.mpc.models import ControllerKind, StepSolution
from mogpdr.sim.harness import build_controllers
from mogpdr.sim.presets import zero

CFG = zero()
SYS = CFG.system_model()
X0 = np.array(CFG.campaign.x0)


@pytest.fixture(scope="module")
def tube():
    return setup_controller(SYS, CFG.mpc, kind=ControllerKind.ROBUST_TUBE)


@pytest.fixture(scope="module")
def controllers():
    data = Dataset(np.zeros((1, 2)), np.zeros((1, 2)))
    tr = CFG.training
    model = train_mogp(data, tr.gating, tr.kernel_init, seed=0, support=SYS.support)
    return build_controllers(SYS, CFG.mpc, model, data, tr.kernel_init, tr.gating)


def test_origin_is_a_fixed_point(tube):
    sol = solve_step(tube, np.zeros(2))
    assert sol.status is SolverStatus.OPTIMAL
    assert sol.objective == pytest.approx(0.0, abs=1e-6)
    assert np.allclose(sol.u, 0.0, atol=1e-5)


def test_cost_decreases_along_undisturbed_trajectory(tube):
    x = X0.copy()
    costs = []
    for _ in range(30):
        sol = solve_step(tube, x)
        assert sol.ok
        assert SYS.input_set.contains(sol.u, 1e-7)
        costs.append(sol.objective)
        x = SYS.step(x, sol.u, np.zeros(2))
        assert SYS.state_box.contains(x, 1e-7)
    assert all(b <= a + 1e-9 for a, b in zip(costs, costs[1:]))
    assert np.linalg.norm(x) <= 1e-4


def test_plan_satisfies_nominal_dynamics(tube):
    sol = solve_step(tube, X0)
    assert sol.s.shape == (CFG.mpc.horizon + 1, 2) and sol.v.shape == (CFG.mpc.horizon, 1)
    assert np.allclose(sol.s[0], X0)
    for k in range(CFG.mpc.horizon):
        assert np.allclose(SYS.a @ sol.s[k] + SYS.b @ sol.v[k], sol.s[k + 1], atol=1e-6)
    assert tube.terminal.polytope.contains(sol.s[-1], 1e-6)


def test_shifted_plan_stays_feasible(tube):
    sol = solve_step(tube, X0)
    x_next = SYS.step(X0, sol.u, np.zeros(2))
    assert check_candidate(tube, x_next, shifted_candidate(tube, sol), None) == []


def test_infeasible_state_is_reported(tube):
    # moving fast towards the upper position bound: no admissible input can stop in time
    sol = solve_step(tube, np.array([2.9, 3.0]))
    assert sol.status is SolverStatus.INFEASIBLE
    assert not sol.ok and sol.u is None


def test_control_law_needs_an_optimal_step(tube):
    failed = StepSolution(SolverStatus.INFEASIBLE, None, None, None, None, float("nan"))
    with pytest.raises(ContractViolation):
        control_law(failed, X0, tube.k_gain)
    with pytest.raises(ContractViolation):
        shifted_candidate(tube, failed)


def test_model_based_controller_needs_a_model():
    with pytest.raises(ConfigError):
        setup_controller(SYS, CFG.mpc, kind=ControllerKind.MOGP_DR)


def test_controllers_share_offline_sets(controllers):
    ref = controllers[ControllerKind.MOGP_DR]
    for ctrl in controllers.values():
        assert np.array_equal(ctrl.k_gain, ref.k_gain)
        assert ctrl.z_set is ref.z_set
        assert ctrl.terminal is ref.terminal
    assert controllers[ControllerKind.ROBUST_TUBE].model is None


def test_without_disturbances_all_controllers_agree(controllers):
    objectives = [solve_step(ctrl, X0).objective for ctrl in controllers.values()]
    assert max(objectives) - min(objectives) <= 1e-4 * (1.0 + max(objectives))


def _batch_lqr(a, b, q, r, p, x0, horizon):
    """Unconstrained finite-horizon optimum by dense least squares: s = Sx x0 + Su v."""
    n, m = b.shape
    sx = np.vstack([np.linalg.matrix_power(a, k) for k in range(horizon + 1)])
    su = np.zeros(((horizon + 1) * n, horizon * m))
    for k in range(1, horizon + 1):
        for j in range(k):
            su[k * n : (k + 1) * n, j * m : (j + 1) * m] = np.linalg.matrix_power(a, k - 1 - j) @ b
    q_bar = block_diag(*([q] * horizon + [p]))
    r_bar = block_diag(*([r] * horizon))
    hess = su.T @ q_bar @ su + r_bar
    v = -np.linalg.solve(hess, su.T @ q_bar @ sx @ x0)
    s = sx @ x0 + su @ v
    return v.reshape(horizon, m), float(s @ q_bar @ s + v @ r_bar @ v)


def test_loose_constraints_reproduce_batch_lqr(tube):
    x0 = np.array([0.5, -0.3])
    assert tube.terminal.polytope.contains(x0)
    q, r = CFG.mpc.q_matrix, CFG.mpc.r_matrix
    v_ref, cost_ref = _batch_lqr(SYS.a, SYS.b, q, r, tube.p_terminal, x0, CFG.mpc.horizon)
    sol = solve_step(tube, x0)
    assert sol.ok
    assert np.allclose(sol.v, v_ref, atol=1e-6)
    assert sol.objective == pytest.approx(cost_ref, rel=1e-6)
    # with the Riccati terminal weight the finite-horizon optimum is the LQR law
    assert np.allclose(sol.u, tube.k_gain @ x0, atol=1e-6)
    assert cost_ref == pytest.approx(float(x0 @ tube.p_terminal @ x0), rel=1e-9)


def test_oversized_support_is_an_empty_set_error():
    huge = dataclasses.replace(SYS, support=Box.symmetric(3.5, 2))
    with pytest.raises(EmptySetError) as err:
        setup_controller(huge, CFG.mpc, kind=ControllerKind.ROBUST_TUBE)
    assert err.value.set_name == "X (-) Z"
