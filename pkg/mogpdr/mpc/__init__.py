# mogpdr/mpc/__init__.py
from mogpdr.mpc.controller import (
    Candidate,
    check_candidate,
    control_law,
    setup_controller,
    shifted_candidate,
    solve_step,
    step_offsets,
)
from mogpdr.mpc.models import ControllerKind, ControllerState, MPCConfig, StepSolution, SystemModel
from mogpdr.mpc.riccati import dare_residual, riccati_gain

__all__ = [
    "Candidate",
    "ControllerKind",
    "ControllerState",
    "MPCConfig",
    "StepSolution",
    "SystemModel",
    "check_candidate",
    "control_law",
    "dare_residual",
    "riccati_gain",
    "setup_controller",
    "shifted_candidate",
    "solve_step",
    "step_offsets",
]
