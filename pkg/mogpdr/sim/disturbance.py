# mogpdr/sim/disturbance.py
"""State-dependent multimodal disturbance generators."""
from __future__ import annotations

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import softmax

from mogpdr.geometry.sets import Box
from mogpdr.mogp.model import Dataset
from mogpdr.mpc.models import SystemModel

__all__ = [
    "DisturbanceKind",
    "DisturbanceSpec",
    "franke",
    "franke_bumps",
    "mode_probabilities",
    "sample_mode",
    "sample_disturbance",
    "collect_training_data",
    "MAX_REJECTIONS",
]

MAX_REJECTIONS = 100


class DisturbanceKind(str, Enum):
    FRANKE = "franke"
    QUADROTOR_WIND = "quadrotor-wind"
    ZERO = "zero"
    CUSTOM = "custom"


def franke_bumps(x: float, y: float) -> np.ndarray:
    """The four Franke terms as nonnegative bump responses (the dip is returned by magnitude)."""
    return np.array(
        [
            0.75 * np.exp(-((9 * x - 2) ** 2 + (9 * y - 2) ** 2) / 4.0),
            0.75 * np.exp(-((9 * x + 1) ** 2) / 49.0 - (9 * y + 1) / 10.0),
            0.5 * np.exp(-((9 * x - 7) ** 2 + (9 * y - 3) ** 2) / 4.0),
            0.2 * np.exp(-((9 * x - 4) ** 2) - (9 * y - 7) ** 2),
        ]
    )


def franke(x: float, y: float) -> float:
    b = franke_bumps(x, y)
    return float(b[0] + b[1] + b[2] - b[3])


class DisturbanceSpec(BaseModel):
    """Mixture of offset modes whose weights follow bump responses over a 2-D plane of the state.

    franke / quadrotor-wind gate with the Franke bumps; custom gates with Gaussian bumps
    centred at ``bump_centers`` (normalised plane coordinates) of width ``bump_width``.
    """

    model_config = ConfigDict(frozen=True)

    kind: DisturbanceKind = DisturbanceKind.FRANKE
    support_lower: list[float]
    support_upper: list[float]
    mode_offsets: list[list[float]] = Field(default_factory=list)
    noise_scales: list[float] = Field(default_factory=list)
    sharpness: float = Field(default=8.0, ge=0)
    plane: tuple[int, int] = (0, 1)
    plane_lower: tuple[float, float] = (0.0, 0.0)
    plane_upper: tuple[float, float] = (1.0, 1.0)
    bump_centers: list[tuple[float, float]] = Field(default_factory=list)
    bump_width: float = Field(default=0.2, gt=0)

    @model_validator(mode="after")
    def _consistent(self) -> DisturbanceSpec:
        n = len(self.support_lower)
        if n == 0 or len(self.support_upper) != n:
            raise ValueError("support bounds must be nonempty and of equal length")
        if any(lo > up for lo, up in zip(self.support_lower, self.support_upper, strict=True)):
            raise ValueError("crossed disturbance support bounds")
        if self.kind is DisturbanceKind.ZERO:
            return self
        modes = len(self.mode_offsets)
        if modes == 0 or len(self.noise_scales) != modes:
            raise ValueError("every mode needs an offset vector and a noise scale")
        if any(len(o) != n for o in self.mode_offsets):
            raise ValueError(f"mode offsets must have length {n}")
        if any(s < 0 for s in self.noise_scales):
            raise ValueError("noise scales must be nonnegative")
        expected = len(self.bump_centers) if self.kind is DisturbanceKind.CUSTOM else 4
        if modes != expected:
            raise ValueError(f"{self.kind.value} disturbances need {expected} modes, got {modes}")
        if max(self.plane) >= n or self.plane[0] == self.plane[1]:
            raise ValueError(f"gating plane {self.plane} invalid for a {n}-dim state")
        if any(up <= lo for lo, up in zip(self.plane_lower, self.plane_upper, strict=True)):
            raise ValueError("gating plane bounds must have positive width")
        return self

    @property
    def support(self) -> Box:
        return Box(self.support_lower, self.support_upper)

    @property
    def dim(self) -> int:
        return len(self.support_lower)

    @property
    def n_modes(self) -> int:
        return len(self.mode_offsets)


def _plane_point(spec: DisturbanceSpec, x: np.ndarray) -> tuple[float, float]:
    lo = np.asarray(spec.plane_lower)
    up = np.asarray(spec.plane_upper)
    p = np.asarray([x[spec.plane[0]], x[spec.plane[1]]], dtype=float)
    u = np.clip((p - lo) / (up - lo), 0.0, 1.0)
    return float(u[0]), float(u[1])


def mode_probabilities(spec: DisturbanceSpec, x: np.ndarray) -> np.ndarray:
    """Softmax(sharpness * bump responses) at the normalised state."""
    if spec.kind is DisturbanceKind.ZERO:
        return np.ones(1)
    u, v = _plane_point(spec, np.asarray(x, dtype=float))
    if spec.kind is DisturbanceKind.CUSTOM:
        c = np.asarray(spec.bump_centers, dtype=float)
        bumps = np.exp(-((c[:, 0] - u) ** 2 + (c[:, 1] - v) ** 2) / (2.0 * spec.bump_width**2))
    else:
        bumps = franke_bumps(u, v)
    return softmax(spec.sharpness * bumps)


def sample_mode(spec: DisturbanceSpec, x: np.ndarray, rng: np.random.Generator) -> tuple[int, np.ndarray]:
    """Draw (mode, w); w is rejection-resampled into the support and clipped as a last resort."""
    if spec.kind is DisturbanceKind.ZERO:
        return 0, np.zeros(spec.dim)
    probs = mode_probabilities(spec, x)
    mode = int(rng.choice(probs.size, p=probs))
    offset = np.asarray(spec.mode_offsets[mode], dtype=float)
    scale = spec.noise_scales[mode]
    support = spec.support
    w = offset + scale * rng.standard_normal(spec.dim)
    for _ in range(MAX_REJECTIONS - 1):
        if support.contains(w, tol=0.0):
            break
        w = offset + scale * rng.standard_normal(spec.dim)
    w = support.clip(w)
    assert support.contains(w, tol=0.0), "sampled disturbance left the support"
    return mode, w


def sample_disturbance(spec: DisturbanceSpec, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return sample_mode(spec, x, rng)[1]


def collect_training_data(sys: SystemModel, spec: DisturbanceSpec, n_points: int, seed: int) -> Dataset:
    """States uniform over the state box, one disturbance realisation each."""
    state_box = sys.state_box
    if n_points < 10:
        raise ValueError(f"need at least 10 training points, got {n_points}")
    rng = np.random.default_rng(seed)
    z = rng.uniform(state_box.lower, state_box.upper, size=(n_points, state_box.dim))
    y = np.vstack([sample_disturbance(spec, zi, rng) for zi in z])
    return Dataset(z, y)
