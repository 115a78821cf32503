# mogpdr/mogp/training.py
"""Collapsed Gibbs training of the mixture of GP experts, one output dimension at a time."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from mogpdr.errors import TrainingError
from mogpdr.geometry.sets import Box
from mogpdr.mogp.gating import GatingParams, dp_prior
from mogpdr.mogp.gp import GPCache, KernelParams, fit_hyperparameters
from mogpdr.mogp.model import Dataset, DimensionModel, MoGPModel

logger = logging.getLogger(__name__)

__all__ = ["train_mogp", "train_single_gp", "DEFAULT_SWEEPS", "REFIT_EVERY", "MIN_REFIT_POINTS"]

DEFAULT_SWEEPS = 200
REFIT_EVERY = 20
MIN_REFIT_POINTS = 3
_LOG_2PI = float(np.log(2.0 * np.pi))


def _norm_logpdf(y: float, mean: float, var: float) -> float:
    return -0.5 * (_LOG_2PI + np.log(var) + (y - mean) ** 2 / var)


@dataclass
class _Expert:
    params: KernelParams
    members: np.ndarray
    cache: GPCache
    kinv_diag: np.ndarray
    position: dict[int, int]


class _GibbsSampler:
    def __init__(
        self,
        z: np.ndarray,
        y: np.ndarray,
        gating: GatingParams,
        kernel_init: KernelParams,
        rng: np.random.Generator,
    ) -> None:
        self.z = z
        self.y = y
        self.n = y.size
        self.gating = gating
        self.kernel_init = kernel_init
        self.rng = rng
        sq = np.sum((z[:, None, :] - z[None, :, :]) ** 2, axis=2)
        self.log_g = -sq / (2.0 * gating.kernel_width**2)
        np.fill_diagonal(self.log_g, -np.inf)
        self.labels = np.zeros(self.n, dtype=int)
        self.experts = [self._make(kernel_init, np.arange(self.n))]

    def _make(self, params: KernelParams, members: np.ndarray) -> _Expert:
        members = np.sort(members)
        cache = GPCache.condition(self.z[members], self.y[members], params)
        position = {int(i): p for p, i in enumerate(members)}
        return _Expert(params, members, cache, np.diag(cache.inverse()).copy(), position)

    # ---- one Gibbs update ----
    def _log_predictive(self, i: int, j: int) -> float:
        e = self.experts[j]
        if j == self.labels[i]:
            # leave-one-out predictive from the factorisation that still contains i
            pos = e.position[i]
            kinv_ii = e.kinv_diag[pos]
            return _norm_logpdf(self.y[i], self.y[i] - e.cache.alpha[pos] / kinv_ii, 1.0 / kinv_ii)
        mean, var = e.cache.predict(self.z[i : i + 1])
        return _norm_logpdf(self.y[i], float(mean[0]), float(var[0]) + e.params.noise_variance)

    def update(self, i: int) -> None:
        j0 = int(self.labels[i])
        m = len(self.experts)
        existing, new = dp_prior(self.log_g[i], self.labels, m, self.gating)
        singleton = self.experts[j0].members.size == 1
        logp = np.full(m + 1, -np.inf)
        with np.errstate(divide="ignore"):
            log_prior = np.log(np.append(existing, new))
        for j in range(m):
            if existing[j] > 0.0 and not (j == j0 and singleton):
                logp[j] = log_prior[j] + self._log_predictive(i, j)
        var_new = self.kernel_init.signal_variance + self.kernel_init.noise_variance
        logp[m] = log_prior[m] + _norm_logpdf(self.y[i], 0.0, var_new)
        p = np.exp(logp - logsumexp(logp))
        choice = int(self.rng.choice(m + 1, p=p / p.sum()))
        if choice == j0 or (choice == m and singleton):
            return
        self._move(i, j0, choice)

    def _move(self, i: int, src: int, dst: int) -> None:
        if dst == len(self.experts):
            self.experts.append(self._make(self.kernel_init, np.array([i])))
        else:
            e = self.experts[dst]
            self.experts[dst] = self._make(e.params, np.append(e.members, i))
        self.labels[i] = dst
        old = self.experts[src]
        remaining = old.members[old.members != i]
        if remaining.size:
            self.experts[src] = self._make(old.params, remaining)
        else:
            del self.experts[src]
            self.labels[self.labels > src] -= 1

    # ---- sweeps ----
    def sweep(self) -> None:
        for i in self.rng.permutation(self.n):
            self.update(int(i))

    def refit(self) -> None:
        for j, e in enumerate(self.experts):
            if e.members.size >= MIN_REFIT_POINTS:
                params = fit_hyperparameters(self.z[e.members], self.y[e.members], e.params)
                self.experts[j] = self._make(params, e.members)

    def map_score(self) -> float:
        """Log partition prior (Ewens form) plus the experts' log marginal likelihoods."""
        alpha = self.gating.concentration
        sizes = np.array([e.members.size for e in self.experts], dtype=float)
        prior = len(sizes) * np.log(alpha) + np.sum(gammaln(sizes)) + gammaln(alpha) - gammaln(self.n + alpha)
        return float(prior + sum(e.cache.log_marginal_likelihood() for e in self.experts))

    def snapshot(self) -> tuple[np.ndarray, list[KernelParams]]:
        return self.labels.copy(), [e.params for e in self.experts]


def _canonical(labels: np.ndarray, params: list[KernelParams]) -> tuple[np.ndarray, list[KernelParams]]:
    """Relabel experts in order of first appearance."""
    order: dict[int, int] = {}
    for lab in labels.tolist():
        order.setdefault(lab, len(order))
    out = np.array([order[lab] for lab in labels.tolist()], dtype=int)
    inv = sorted(order, key=order.__getitem__)
    return out, [params[j] for j in inv]


def _train_dimension(
    z: np.ndarray,
    y: np.ndarray,
    gating: GatingParams,
    kernel_init: KernelParams,
    rng: np.random.Generator,
    iters: int,
    refit_every: int,
) -> DimensionModel:
    sampler = _GibbsSampler(z, y, gating, kernel_init, rng)
    best_score = sampler.map_score()
    best = sampler.snapshot()
    for sweep in range(1, iters + 1):
        sampler.sweep()
        if refit_every and sweep % refit_every == 0:
            sampler.refit()
        score = sampler.map_score()
        if score > best_score:
            best_score, best = score, sampler.snapshot()
    labels, params = _canonical(*best)
    return DimensionModel(labels, params, map_score=best_score)


def _check_inputs(data: Dataset, support: Box | None) -> Box:
    if support is None:
        return Box(data.outputs.min(axis=0), data.outputs.max(axis=0))
    if support.dim != data.output_dim:
        raise TrainingError(f"support box has dim {support.dim}, data has {data.output_dim} outputs")
    bad = data.outside(support)
    if bad.size:
        raise TrainingError(f"{bad.size} training outputs lie outside the disturbance support (first row {bad[0]})")
    return support


def train_mogp(
    data: Dataset,
    gating: GatingParams,
    kernel_init: KernelParams,
    seed: int,
    iters: int = DEFAULT_SWEEPS,
    *,
    support: Box | None = None,
    refit_every: int = REFIT_EVERY,
) -> MoGPModel:
    """Fit a MoGP model per output dimension by collapsed Gibbs sampling with MAP selection."""
    if iters < 1:
        raise TrainingError("at least one Gibbs sweep is required")
    support = _check_inputs(data, support)
    init = kernel_init.for_dim(data.input_dim)
    z = data.inputs
    streams = np.random.SeedSequence(seed).spawn(data.output_dim)
    degenerate = data.size > 1 and bool(np.all(np.ptp(z, axis=0) <= 1e-12))
    if degenerate:
        logger.warning("all %d training inputs coincide; training a single expert per dimension", data.size)

    dims = []
    try:
        for d in range(data.output_dim):
            y = data.outputs[:, d]
            if data.size == 1 or degenerate:
                dims.append(DimensionModel(np.zeros(data.size, dtype=int), [init], degenerate=degenerate))
                continue
            dm = _train_dimension(z, y, gating, init, np.random.default_rng(streams[d]), iters, refit_every)
            logger.info("dim %d: %d expert(s), MAP score %.3f", d, dm.n_experts, dm.map_score)
            dims.append(dm)
        return MoGPModel(z, data.outputs, support, gating, tuple(dims))
    except (ValueError, FloatingPointError) as e:
        raise TrainingError(f"MoGP training failed: {e}") from e


def train_single_gp(
    data: Dataset,
    kernel_init: KernelParams,
    gating: GatingParams | None = None,
    *,
    support: Box | None = None,
) -> MoGPModel:
    """One GP per output dimension (the mixture forced to a single expert)."""
    support = _check_inputs(data, support)
    init = kernel_init.for_dim(data.input_dim)
    dims = []
    for d in range(data.output_dim):
        y = data.outputs[:, d]
        params = fit_hyperparameters(data.inputs, y, init) if data.size >= MIN_REFIT_POINTS else init
        dims.append(DimensionModel(np.zeros(data.size, dtype=int), [params]))
    return MoGPModel(data.inputs, data.outputs, support, gating or GatingParams(), tuple(dims))
