# mogpdr/mogp/model.py
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from mogpdr.geometry.sets import Box
from mogpdr.mogp.gating import GatingParams, dp_prior, log_gating_kernel, redistribute
from mogpdr.mogp.gp import GPCache, KernelParams

logger = logging.getLogger(__name__)

__all__ = [
    "Dataset",
    "DimensionModel",
    "MoGPModel",
    "MixtureComponent",
    "MixturePrediction",
    "gating_weights",
    "predict_mixture",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    inputs: np.ndarray
    outputs: np.ndarray

    def __post_init__(self) -> None:
        z = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        y = np.asarray(self.outputs, dtype=float)
        y = y.reshape(z.shape[0], -1) if y.size else y.reshape(z.shape[0], 0)
        if z.shape[0] < 1:
            raise ValueError("dataset needs at least one point")
        object.__setattr__(self, "inputs", z)
        object.__setattr__(self, "outputs", y)

    @property
    def size(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.inputs.shape[1])

    @property
    def output_dim(self) -> int:
        return int(self.outputs.shape[1])

    def outside(self, support: Box, tol: float = 1e-12) -> np.ndarray:
        """Row indices with an output outside the support box."""
        bad = np.any((self.outputs < support.lower - tol) | (self.outputs > support.upper + tol), axis=1)
        return np.flatnonzero(bad)


@dataclass(eq=False)
class DimensionModel:
    """Trained experts for one output dimension."""

    assignments: np.ndarray
    experts: list[KernelParams]
    map_score: float = float("nan")
    degenerate: bool = False
    caches: list[GPCache] = field(default_factory=list, repr=False)

    @property
    def n_experts(self) -> int:
        return len(self.experts)

    def build_caches(self, inputs: np.ndarray, outputs_dim: np.ndarray) -> DimensionModel:
        self.caches = [
            GPCache.condition(inputs[self.assignments == j], outputs_dim[self.assignments == j], p)
            for j, p in enumerate(self.experts)
        ]
        return self


@dataclass(frozen=True, eq=False)
class MoGPModel:
    inputs: np.ndarray
    outputs: np.ndarray
    support: Box
    gating: GatingParams
    dims: tuple[DimensionModel, ...]

    def __post_init__(self) -> None:
        for d, dm in enumerate(self.dims):
            if dm.assignments.shape != (self.inputs.shape[0],):
                raise ValueError(f"dimension {d}: assignment vector does not cover every training point")
            if dm.n_experts < 1 or set(np.unique(dm.assignments).tolist()) != set(range(dm.n_experts)):
                raise ValueError(f"dimension {d}: expert labels must be 0..M-1, each non-empty")
            if not dm.caches:
                dm.build_caches(self.inputs, self.outputs[:, d])

    @property
    def n_experts(self) -> list[int]:
        return [dm.n_experts for dm in self.dims]

    @property
    def output_dim(self) -> int:
        return len(self.dims)


class MixtureComponent(NamedTuple):
    weight: float
    mean: float
    variance: float


@dataclass(frozen=True)
class MixturePrediction:
    components: tuple[tuple[MixtureComponent, ...], ...]

    @property
    def output_dim(self) -> int:
        return len(self.components)

    def weights(self, dim: int) -> np.ndarray:
        return np.array([c.weight for c in self.components[dim]])

    def means(self, dim: int) -> np.ndarray:
        return np.array([c.mean for c in self.components[dim]])

    def variances(self, dim: int) -> np.ndarray:
        return np.array([c.variance for c in self.components[dim]])

    @classmethod
    def degenerate(cls, means: np.ndarray, variances: np.ndarray | None = None) -> MixturePrediction:
        """Single-component prediction per dimension, used when no model is attached."""
        m = np.atleast_1d(np.asarray(means, dtype=float))
        v = np.zeros_like(m) if variances is None else np.atleast_1d(np.asarray(variances, dtype=float))
        return cls(tuple((MixtureComponent(1.0, float(mi), float(vi)),) for mi, vi in zip(m, v, strict=True)))


def gating_weights(model: MoGPModel, dim: int, query: np.ndarray) -> np.ndarray:
    dm = model.dims[dim]
    log_k = log_gating_kernel(query, model.inputs, model.gating.kernel_width)
    existing, new = dp_prior(log_k, dm.assignments, dm.n_experts, model.gating)
    return redistribute(existing, new)


def predict_mixture(model: MoGPModel, query: np.ndarray, *, observation_noise: bool = True) -> MixturePrediction:
    """Gated expert predictions per output dimension.

    Component variances are the expert's latent posterior variance plus, with
    ``observation_noise``, its fitted noise variance: the spread of the disturbance
    itself rather than of its mean.
    """
    q = np.asarray(query, dtype=float).reshape(1, -1)
    out = []
    for d, dm in enumerate(model.dims):
        gamma = gating_weights(model, d, q[0])
        lo, up = float(model.support.lower[d]), float(model.support.upper[d])
        comps = []
        for j, cache in enumerate(dm.caches):
            mean, var = cache.predict(q)
            mu = float(mean[0])
            if not lo <= mu <= up:
                logger.debug("clamping expert %d mean %.4f into [%.3f, %.3f] (dim %d)", j, mu, lo, up, d)
                mu = min(max(mu, lo), up)
            variance = float(var[0])
            if observation_noise:
                variance += dm.experts[j].noise_variance
            comps.append(MixtureComponent(float(gamma[j]), mu, variance))
        out.append(tuple(comps))
    return MixturePrediction(tuple(out))
