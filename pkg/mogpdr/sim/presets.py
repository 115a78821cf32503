# mogpdr/sim/presets.py
"""Builtin case studies: a double integrator with Franke-gated disturbances and a linearised quadrotor."""
from __future__ import annotations

from collections.abc import Callable

from mogpdr.mogp.gating import GatingParams
from mogpdr.mogp.gp import KernelParams
from mogpdr.mpc.models import MPCConfig
from mogpdr.sim.disturbance import DisturbanceKind, DisturbanceSpec
from mogpdr.storage.experiment import CampaignConfig, ExperimentConfig, SystemConfig, TrainingConfig

__all__ = ["numerical", "quadrotor", "zero", "PRESETS"]

# The origin must be interior to the state box for the terminal set to exist,
# so the upper bounds are widened from the published [-7, 0] x [-3, 2].
_NUMERICAL_SYSTEM = SystemConfig(
    a=[[1.0, 1.0], [0.0, 1.0]],
    b=[[0.5], [1.0]],
    state_lower=[-7.0, -3.0],
    state_upper=[3.0, 3.0],
    input_lower=[-5.0],
    input_upper=[5.0],
)

_NUMERICAL_MPC = MPCConfig(horizon=10, q=[[1.0, 0.0], [0.0, 1.0]], r=[[0.1]], risk=0.2)


def numerical() -> ExperimentConfig:
    return ExperimentConfig(
        name="numerical",
        system=_NUMERICAL_SYSTEM,
        mpc=_NUMERICAL_MPC,
        disturbance=DisturbanceSpec(
            kind=DisturbanceKind.FRANKE,
            support_lower=[-0.8, -0.8],
            support_upper=[0.8, 0.8],
            # velocity offsets split into a cluster near zero and one at -0.7, so the
            # upper tail of w_2 stays well inside the support wherever the bump mix is balanced
            mode_offsets=[[0.3, -0.1], [-0.3, -0.7], [-0.3, -0.1], [0.3, 0.0]],
            noise_scales=[0.05, 0.05, 0.05, 0.05],
            sharpness=4.0,
            plane=(0, 1),
            plane_lower=(-7.0, -3.0),
            plane_upper=(3.0, 3.0),
        ),
        training=TrainingConfig(
            n_points=200,
            sweeps=200,
            seed=0,
            gating=GatingParams(kernel_width=1.0, concentration=1.0),
            kernel_init=KernelParams(lengthscales=[2.0, 2.0], signal_variance=0.25, noise_variance=0.0025),
        ),
        campaign=CampaignConfig(x0=[-5.0, -2.0], runs=50, steps=30, base_seed=1000),
    )


def quadrotor() -> ExperimentConfig:
    """Unit mass, unit sampling time; states (p_x, v_x, p_y, v_y)."""
    a = [
        [1.0, 1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
    b = [[0.5, 0.0], [1.0, 0.0], [0.0, 0.5], [0.0, 1.0]]
    eye4 = [[float(i == j) for j in range(4)] for i in range(4)]
    return ExperimentConfig(
        name="quadrotor",
        system=SystemConfig(
            a=a,
            b=b,
            state_lower=[-4.0, -4.0, -4.0, -4.0],
            state_upper=[18.0, 4.0, 18.0, 4.0],
            input_lower=[-7.0, -7.0],
            input_upper=[7.0, 7.0],
        ),
        mpc=MPCConfig(horizon=5, q=eye4, r=[[0.1, 0.0], [0.0, 0.1]], risk=0.2),
        disturbance=DisturbanceSpec(
            kind=DisturbanceKind.QUADROTOR_WIND,
            support_lower=[-0.6] * 4,
            support_upper=[0.6] * 4,
            # wind never pushes the velocities down by much: 0.1 or 0.5 per axis
            mode_offsets=[
                [0.2, 0.1, 0.2, 0.1],
                [-0.2, 0.5, -0.2, 0.5],
                [0.2, 0.1, -0.2, 0.5],
                [-0.2, 0.5, 0.2, 0.1],
            ],
            noise_scales=[0.05, 0.05, 0.05, 0.05],
            sharpness=4.0,
            plane=(0, 2),
            plane_lower=(-4.0, -4.0),
            plane_upper=(18.0, 18.0),
        ),
        training=TrainingConfig(
            n_points=200,
            sweeps=200,
            seed=0,
            gating=GatingParams(kernel_width=2.0, concentration=1.0),
            kernel_init=KernelParams(lengthscales=[4.0, 2.0, 4.0, 2.0], signal_variance=0.25, noise_variance=0.0025),
        ),
        campaign=CampaignConfig(x0=[10.0, 0.0, 10.0, 0.0], runs=50, steps=30, base_seed=1000),
    )


def zero() -> ExperimentConfig:
    """Numerical system without disturbances."""
    base = numerical()
    return base.model_copy(
        update={
            "name": "zero",
            "disturbance": DisturbanceSpec(
                kind=DisturbanceKind.ZERO, support_lower=[0.0, 0.0], support_upper=[0.0, 0.0]
            ),
            "training": base.training.model_copy(update={"sweeps": 20}),
        }
    )


PRESETS: dict[str, Callable[[], ExperimentConfig]] = {
    "numerical": numerical,
    "quadrotor": quadrotor,
    "zero": zero,
}
