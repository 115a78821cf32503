import numpy as np
import pytest

from mogpdr.mogp.model import Dataset
from mogpdr.mogp.training import train_mogp
from mogpdr.mpc.controller import setup_controller
from mogpdr.mpc.models import ControllerKind
from mogpdr.sim.campaign import run_campaign
from mogpdr.sim.disturbance import collect_training_data
from mogpdr.sim.harness import build_controllers
from mogpdr.sim.presets import numerical, quadrotor, zero

ZERO = zero()
ZERO_SYS = ZERO.system_model()


@pytest.fixture(scope="module")
def tube():
    return setup_controller(ZERO_SYS, ZERO.mpc, kind=ControllerKind.ROBUST_TUBE)


def _campaign(ctrl, runs=2, steps=3, base_seed=1000):
    x0 = np.array(ZERO.campaign.x0)
    ctrls = {ControllerKind.ROBUST_TUBE: ctrl}
    return run_campaign(ctrls, ZERO_SYS, ZERO.disturbance, x0, steps, runs, base_seed, workers=1)


def test_runs_use_paired_seeds(tube):
    result = _campaign(tube, runs=3, base_seed=40)
    assert [log.seed for log in result.logs["robust-tube"]] == [40, 41, 42]


def test_campaign_is_deterministic(tube):
    a, b = _campaign(tube), _campaign(tube)
    assert np.array_equal(a.costs("robust-tube"), b.costs("robust-tube"))
    assert a.summaries["robust-tube"].mean_cost == b.summaries["robust-tube"].mean_cost


def test_summary_counts(tube):
    result = _campaign(tube, runs=2, steps=4)
    s = result.summaries["robust-tube"]
    assert s.runs == 2
    assert s.violation_rate == 0.0 and s.infeasible_steps == 0 and s.aborted_runs == 0
    assert s.mean_cost == pytest.approx(float(np.mean(result.costs("robust-tube"))))
    assert s.std_cost == pytest.approx(0.0, abs=1e-9)


def test_string_keys_and_reduction(tube):
    result = run_campaign({"robust-tube": tube}, ZERO_SYS, ZERO.disturbance, np.zeros(2), 2, 1, 0, workers=1)
    assert result.controllers == ["robust-tube"]
    assert result.reduction("robust-tube", "robust-tube") == 0.0


def test_needs_a_run(tube):
    with pytest.raises(ValueError):
        _campaign(tube, runs=0)


def _case_study(cfg, runs, audit_runs=0):
    sys = cfg.system_model()
    tr = cfg.training
    data = collect_training_data(sys, cfg.disturbance, tr.n_points, tr.seed)
    model = train_mogp(data, tr.gating, tr.kernel_init, tr.seed, tr.sweeps, support=sys.support)
    controllers = build_controllers(sys, cfg.mpc, model, Dataset(data.inputs, data.outputs), tr.kernel_init, tr.gating)
    c = cfg.campaign
    return run_campaign(
        controllers, sys, cfg.disturbance, np.array(c.x0), c.steps, runs, c.base_seed, audit_runs=audit_runs
    )


def _assert_recursively_feasible(result, risk):
    for name, s in result.summaries.items():
        assert s.aborted_runs == 0, name
        assert s.infeasible_steps == 0, name
        assert s.fallback_steps == 0, name
        assert s.input_violations == 0, name
    assert result.summaries["robust-tube"].violation_rate == 0.0
    assert result.summaries["mogp-dr"].violation_rate <= risk + 0.05


@pytest.mark.slow
def test_numerical_case_study_ordering():
    cfg = numerical()
    result = _case_study(cfg, cfg.campaign.runs, audit_runs=5)
    s = result.summaries
    assert s["mogp-dr"].mean_cost < s["gp-dr"].mean_cost < s["robust-tube"].mean_cost
    assert result.reduction("mogp-dr", "robust-tube") >= 10.0
    _assert_recursively_feasible(result, cfg.mpc.risk)
    for name, logs in result.logs.items():
        for log in logs[:5]:
            assert log.audit_failures == [], (name, log.seed)


@pytest.mark.slow
def test_quadrotor_case_study_reduction():
    cfg = quadrotor()
    result = _case_study(cfg, 10)
    assert result.reduction("mogp-dr", "robust-tube") >= 2.0
    _assert_recursively_feasible(result, cfg.mpc.risk)
