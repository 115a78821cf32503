# mogpdr/mogp/gating.py
"""Kernel-weighted Dirichlet-process gating."""
from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp

__all__ = ["GatingParams", "log_gating_kernel", "kernel_fractions", "dp_prior", "redistribute"]


class GatingParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    kernel_width: float = Field(default=1.0, gt=0)
    concentration: float = Field(default=1.0, gt=0)


def log_gating_kernel(query: np.ndarray, inputs: np.ndarray, width: float) -> np.ndarray:
    """log K_phi(query, z_i) for every row z_i of inputs."""
    diff = np.atleast_2d(inputs) - np.asarray(query, dtype=float).reshape(1, -1)
    return -np.sum(diff**2, axis=1) / (2.0 * width**2)


def kernel_fractions(log_k: np.ndarray, labels: np.ndarray, n_experts: int) -> np.ndarray:
    """Share of total kernel mass held by each expert; rows with -inf log weight are ignored."""
    finite = np.isfinite(log_k)
    if not np.any(finite):
        return np.zeros(n_experts)
    w = np.exp(log_k[finite] - logsumexp(log_k[finite]))
    return np.bincount(labels[finite], weights=w, minlength=n_experts)


def dp_prior(
    log_k: np.ndarray, labels: np.ndarray, n_experts: int, gating: GatingParams
) -> tuple[np.ndarray, float]:
    """(existing-expert weights, new-expert weight) from kernel-weighted counts.

    ``log_k`` holds log kernel values to the points being conditioned on (held-out
    points carry -inf). With n of them, each expert gets n * fraction / (n + alpha)
    and a fresh expert gets alpha / (n + alpha).
    """
    n = int(np.count_nonzero(np.isfinite(log_k)))
    denom = n + gating.concentration
    counts = n * kernel_fractions(log_k, labels, n_experts)
    return counts / denom, gating.concentration / denom


def redistribute(existing: np.ndarray, new: float) -> np.ndarray:
    """Fold the new-expert mass into existing experts proportionally."""
    total = float(np.sum(existing))
    if total <= 0.0:
        return np.full(existing.size, 1.0 / existing.size)
    out = existing + new * existing / total
    return out / np.sum(out)
