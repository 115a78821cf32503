# mogpdr/storage/experiment.py
"""Experiment definitions: one JSON document per case study."""
from __future__ import annotations

import json
import logging
import os

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from mogpdr.errors import ConfigError
from mogpdr.geometry.sets import Box
from mogpdr.mogp.gating import GatingParams
from mogpdr.mogp.gp import KernelParams
from mogpdr.mpc.models import MPCConfig, SystemModel
from mogpdr.sim.disturbance import DisturbanceSpec

logger = logging.getLogger(__name__)

__all__ = [
    "SystemConfig",
    "TrainingConfig",
    "CampaignConfig",
    "ExperimentConfig",
    "load_experiment",
    "save_experiment",
]


class SystemConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: list[list[float]]
    b: list[list[float]]
    state_lower: list[float]
    state_upper: list[float]
    input_lower: list[float]
    input_upper: list[float]

    def to_system(self, support: Box) -> SystemModel:
        return SystemModel(
            a=np.asarray(self.a, dtype=float),
            b=np.asarray(self.b, dtype=float),
            state_box=Box(self.state_lower, self.state_upper),
            input_set=Box(self.input_lower, self.input_upper).to_polytope(),
            support=support,
        )


class TrainingConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_points: int = Field(default=200, ge=10)
    sweeps: int = Field(default=200, ge=1)
    refit_every: int = Field(default=20, ge=0)
    seed: int = 0
    gating: GatingParams = Field(default_factory=GatingParams)
    kernel_init: KernelParams = Field(
        default_factory=lambda: KernelParams(lengthscales=[2.0], signal_variance=0.25, noise_variance=0.0025)
    )


class CampaignConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    x0: list[float]
    runs: int = Field(default=50, ge=1)
    steps: int = Field(default=30, ge=1)
    base_seed: int = 1000
    audit_runs: int = Field(default=0, ge=0)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    system: SystemConfig
    mpc: MPCConfig
    disturbance: DisturbanceSpec
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    campaign: CampaignConfig
    output_dir: str | None = None

    @model_validator(mode="after")
    def _well_posed(self) -> ExperimentConfig:
        sys = self.system_model()
        n = sys.n
        for name in ("q", "r"):
            size = len(getattr(self.mpc, name))
            expected = n if name == "q" else sys.m
            if size != expected:
                raise ValueError(f"weight {name.upper()} is {size}x{size}, expected {expected}x{expected}")
        if self.mpc.p is not None and len(self.mpc.p) != n:
            raise ValueError(f"terminal weight P must be {n}x{n}")
        if len(self.campaign.x0) != n:
            raise ValueError(f"x0 has {len(self.campaign.x0)} entries, system has {n} states")
        if not sys.state_box.contains(np.asarray(self.campaign.x0), tol=0.0):
            raise ValueError(f"x0 = {self.campaign.x0} lies outside the state constraints")
        return self

    def system_model(self) -> SystemModel:
        try:
            return self.system.to_system(self.disturbance.support)
        except ValueError as e:
            raise ValueError(f"system definition: {e}") from e


def load_experiment(name_or_path: str) -> ExperimentConfig:
    """Builtin preset by name, else a JSON file."""
    from mogpdr.sim.presets import PRESETS

    if name_or_path in PRESETS:
        return PRESETS[name_or_path]()
    if not os.path.exists(name_or_path):
        raise ConfigError(f"config not found: {name_or_path} (builtin presets: {', '.join(sorted(PRESETS))})")
    try:
        with open(name_or_path, encoding="utf-8") as f:
            data = json.load(f)
        return ExperimentConfig.model_validate(data)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{name_or_path}: not valid JSON ({e})") from e
    except ValidationError as e:
        raise ConfigError(f"{name_or_path}: invalid experiment config\n{e}") from e


def save_experiment(config: ExperimentConfig, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(config.model_dump(mode="json"), f, indent=2)
    logger.info("experiment '%s' saved to %s", config.name, path)
