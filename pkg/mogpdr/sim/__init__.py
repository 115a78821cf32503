from mogpdr.sim.campaign import CampaignResult, ControllerSummary, run_campaign, summarize
from mogpdr.sim.disturbance import (
    DisturbanceKind,
    DisturbanceSpec,
    collect_training_data,
    franke,
    mode_probabilities,
    sample_disturbance,
)
from mogpdr.sim.harness import StepRecord, TrajectoryLog, build_baselines, build_controllers, run_closed_loop

__all__ = [
    "CampaignResult",
    "ControllerSummary",
    "DisturbanceKind",
    "DisturbanceSpec",
    "StepRecord",
    "TrajectoryLog",
    "build_baselines",
    "build_controllers",
    "collect_training_data",
    "franke",
    "mode_probabilities",
    "run_campaign",
    "sample_disturbance",
    "summarize",
]
