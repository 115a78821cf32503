# mogpdr/mogp/gp.py
"""Exact GP regression experts with a squared-exponential ARD kernel."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular
from scipy.optimize import minimize

from mogpdr.errors import GPConditioningError

logger = logging.getLogger(__name__)

__all__ = [
    "KernelParams",
    "GPCache",
    "se_kernel",
    "gp_posterior",
    "log_marginal_likelihood",
    "fit_hyperparameters",
]

_LOG_2PI = float(np.log(2.0 * np.pi))

# log-space box used by the hyperparameter refit
_LOG_BOUNDS = {
    "lengthscale": (np.log(1e-2), np.log(1e3)),
    "signal": (np.log(1e-6), np.log(1e2)),
    "noise": (np.log(1e-6), np.log(1e1)),
}


class KernelParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    lengthscales: list[float]
    signal_variance: float = Field(gt=0)
    # zero noise gives exact interpolation; training keeps it positive
    noise_variance: float = Field(ge=0)

    @field_validator("lengthscales")
    @classmethod
    def _positive(cls, v: list[float]) -> list[float]:
        if not v or any(x <= 0 for x in v):
            raise ValueError("lengthscales must be a nonempty list of positive values")
        return v

    def for_dim(self, n: int) -> KernelParams:
        """Broadcast a single shared lengthscale to n input dimensions."""
        if len(self.lengthscales) == n:
            return self
        if len(self.lengthscales) == 1:
            return self.model_copy(update={"lengthscales": self.lengthscales * n})
        raise ValueError(f"{len(self.lengthscales)} lengthscales for {n} input dimensions")

    def to_log_vector(self) -> np.ndarray:
        return np.log(np.concatenate([self.lengthscales, [self.signal_variance, self.noise_variance]]))

    @classmethod
    def from_log_vector(cls, theta: np.ndarray) -> KernelParams:
        v = np.exp(theta)
        return cls(lengthscales=v[:-2].tolist(), signal_variance=float(v[-2]), noise_variance=float(v[-1]))


def _scaled_sqdist(a: np.ndarray, b: np.ndarray, ell: np.ndarray) -> np.ndarray:
    a = a / ell
    b = b / ell
    d = np.sum(a**2, axis=1)[:, None] + np.sum(b**2, axis=1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d, 0.0)


def se_kernel(a: np.ndarray, b: np.ndarray, params: KernelParams) -> np.ndarray:
    ell = np.asarray(params.lengthscales, dtype=float)
    return params.signal_variance * np.exp(-0.5 * _scaled_sqdist(np.atleast_2d(a), np.atleast_2d(b), ell))


@dataclass(frozen=True, eq=False)
class GPCache:
    """Cholesky factorisation of K + noise I for one expert's data."""

    inputs: np.ndarray
    outputs: np.ndarray
    params: KernelParams
    chol: np.ndarray | None
    alpha: np.ndarray

    @classmethod
    def condition(cls, inputs: np.ndarray, outputs: np.ndarray, params: KernelParams) -> GPCache:
        x = np.atleast_2d(np.asarray(inputs, dtype=float))
        y = np.asarray(outputs, dtype=float).reshape(-1)
        if y.size == 0:
            return cls(x.reshape(0, len(params.lengthscales)), y, params, None, y)
        k = se_kernel(x, x, params) + params.noise_variance * np.eye(y.size)
        try:
            c, _ = cho_factor(k, lower=True, check_finite=True)
        except LinAlgError as e:
            raise GPConditioningError(
                f"kernel Gram matrix is not positive definite for {y.size} points ({params})"
            ) from e
        lower = np.tril(c)
        return cls(x, y, params, lower, cho_solve((lower, True), y))

    @property
    def n(self) -> int:
        return int(self.outputs.size)

    def predict(self, query: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Latent posterior mean and variance at each query row."""
        q = np.atleast_2d(np.asarray(query, dtype=float))
        prior = np.full(q.shape[0], self.params.signal_variance)
        if self.chol is None:
            return np.zeros(q.shape[0]), prior
        ks = se_kernel(q, self.inputs, self.params)
        mean = ks @ self.alpha
        v = solve_triangular(self.chol, ks.T, lower=True)
        var = prior - np.sum(v**2, axis=0)
        if np.any(var < 0.0):
            logger.debug("clamping negative posterior variance (min %.3e)", float(var.min()))
            var = np.maximum(var, 0.0)
        return mean, var

    def inverse(self) -> np.ndarray:
        if self.chol is None:
            return np.zeros((0, 0))
        return cho_solve((self.chol, True), np.eye(self.n))

    def log_marginal_likelihood(self) -> float:
        if self.chol is None:
            return 0.0
        return float(-0.5 * self.outputs @ self.alpha - np.sum(np.log(np.diag(self.chol))) - 0.5 * self.n * _LOG_2PI)


def gp_posterior(
    train_inputs: np.ndarray, train_outputs_dim: np.ndarray, params: KernelParams, query: np.ndarray
) -> tuple[float, float]:
    """Posterior mean and variance of the latent function at a single query point."""
    q = np.atleast_1d(np.asarray(query, dtype=float))
    x = np.asarray(train_inputs, dtype=float)
    if x.size:
        x = x.reshape(-1, q.size)
    mean, var = GPCache.condition(x, train_outputs_dim, params.for_dim(q.size)).predict(q.reshape(1, -1))
    return float(mean[0]), float(var[0])


def log_marginal_likelihood(
    inputs: np.ndarray, outputs: np.ndarray, params: KernelParams, with_gradient: bool = False
) -> float | tuple[float, np.ndarray]:
    """log p(y | X, params); gradient is with respect to log-parameters."""
    cache = GPCache.condition(inputs, outputs, params)
    lml = cache.log_marginal_likelihood()
    if not with_gradient:
        return lml
    if cache.chol is None:
        return lml, np.zeros(len(params.lengthscales) + 2)
    x = cache.inputs
    ell = np.asarray(params.lengthscales, dtype=float)
    k_f = se_kernel(x, x, params)
    inner = np.outer(cache.alpha, cache.alpha) - cache.inverse()
    grad = np.empty(ell.size + 2)
    for d in range(ell.size):
        diff = (x[:, d, None] - x[None, :, d]) ** 2 / ell[d] ** 2
        grad[d] = 0.5 * np.sum(inner * (k_f * diff))
    grad[-2] = 0.5 * np.sum(inner * k_f)
    grad[-1] = 0.5 * params.noise_variance * np.trace(inner)
    return lml, grad


def fit_hyperparameters(
    inputs: np.ndarray, outputs: np.ndarray, init: KernelParams, max_steps: int = 50
) -> KernelParams:
    """Ascend the log marginal likelihood in log-parameter space (L-BFGS-B line search)."""
    n_ell = len(init.lengthscales)
    bounds = [_LOG_BOUNDS["lengthscale"]] * n_ell + [_LOG_BOUNDS["signal"], _LOG_BOUNDS["noise"]]
    theta0 = np.clip(init.to_log_vector(), [b[0] for b in bounds], [b[1] for b in bounds])

    def objective(theta: np.ndarray) -> tuple[float, np.ndarray]:
        try:
            lml, grad = log_marginal_likelihood(inputs, outputs, KernelParams.from_log_vector(theta), True)
        except GPConditioningError:
            return 1e10, np.zeros_like(theta)
        return -lml, -grad

    res = minimize(objective, theta0, jac=True, method="L-BFGS-B", bounds=bounds, options={"maxiter": max_steps})
    if not np.all(np.isfinite(res.x)) or res.fun >= objective(theta0)[0]:
        return KernelParams.from_log_vector(theta0)
    return KernelParams.from_log_vector(res.x)
