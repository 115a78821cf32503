# mogpdr/storage/model_store.py
"""Trained MoGP models on disk (JSON, training data inline)."""
from __future__ import annotations

import json
import logging
import os

import numpy as np
from pydantic import BaseModel, ValidationError

from mogpdr.errors import ConfigError
from mogpdr.geometry.sets import Box
from mogpdr.mogp.gating import GatingParams
from mogpdr.mogp.gp import KernelParams
from mogpdr.mogp.model import DimensionModel, MoGPModel

logger = logging.getLogger(__name__)

__all__ = ["FORMAT_VERSION", "ModelFile", "save_model", "load_model"]

FORMAT_VERSION = 1


class DimensionFile(BaseModel):
    assignments: list[int]
    experts: list[KernelParams]
    map_score: float | None = None
    degenerate: bool = False


class ModelFile(BaseModel):
    format_version: int = FORMAT_VERSION
    inputs: list[list[float]]
    outputs: list[list[float]]
    support_lower: list[float]
    support_upper: list[float]
    gating: GatingParams
    dims: list[DimensionFile]


def _to_file(model: MoGPModel) -> ModelFile:
    return ModelFile(
        inputs=model.inputs.tolist(),
        outputs=model.outputs.tolist(),
        support_lower=model.support.lower.tolist(),
        support_upper=model.support.upper.tolist(),
        gating=model.gating,
        dims=[
            DimensionFile(
                assignments=dm.assignments.tolist(),
                experts=dm.experts,
                map_score=None if np.isnan(dm.map_score) else dm.map_score,
                degenerate=dm.degenerate,
            )
            for dm in model.dims
        ],
    )


def save_model(model: MoGPModel, path: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_to_file(model).model_dump(mode="json"), f, indent=2)
    logger.info("model with experts %s saved to %s", model.n_experts, path)


def load_model(path: str) -> MoGPModel:
    """Rebuild the model and its Cholesky caches from a saved file."""
    try:
        with open(path, encoding="utf-8") as f:
            doc = ModelFile.model_validate(json.load(f))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ConfigError(f"cannot read model file {path}: {e}") from e
    if doc.format_version != FORMAT_VERSION:
        raise ConfigError(f"{path}: unsupported model format version {doc.format_version}")
    dims = tuple(
        DimensionModel(
            np.asarray(d.assignments, dtype=int),
            list(d.experts),
            map_score=float("nan") if d.map_score is None else d.map_score,
            degenerate=d.degenerate,
        )
        for d in doc.dims
    )
    try:
        return MoGPModel(
            np.asarray(doc.inputs, dtype=float),
            np.asarray(doc.outputs, dtype=float),
            Box(doc.support_lower, doc.support_upper),
            doc.gating,
            dims,
        )
    except ValueError as e:
        raise ConfigError(f"{path}: inconsistent model file ({e})") from e
