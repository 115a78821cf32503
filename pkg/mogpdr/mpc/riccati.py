# mogpdr/mpc/riccati.py
from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import solve

from mogpdr.errors import ConfigError
from mogpdr.mpc.models import SystemModel

logger = logging.getLogger(__name__)

__all__ = ["riccati_gain", "dare_residual"]

RICCATI_TOL = 1e-12
RICCATI_MAX_ITER = 100_000


def dare_residual(a: np.ndarray, b: np.ndarray, q: np.ndarray, r: np.ndarray, p: np.ndarray) -> float:
    """Max-norm of  A'PA - P - A'PB (R + B'PB)^-1 B'PA + Q."""
    btpa = b.T @ p @ a
    res = a.T @ p @ a - p - btpa.T @ solve(r + b.T @ p @ b, btpa, assume_a="pos") + q
    return float(np.max(np.abs(res)))


def riccati_gain(
    sys: SystemModel,
    q: np.ndarray,
    r: np.ndarray,
    tol: float = RICCATI_TOL,
    max_iter: int = RICCATI_MAX_ITER,
) -> tuple[np.ndarray, np.ndarray]:
    """Infinite-horizon LQR gain by value iteration on the discrete algebraic Riccati equation.

    Returns (K, P) with u = K x, K = -(R + B'PB)^-1 B'PA.
    """
    a, b = sys.a, sys.b
    q = np.atleast_2d(np.asarray(q, dtype=float))
    r = np.atleast_2d(np.asarray(r, dtype=float))
    p = q.copy()
    for it in range(1, max_iter + 1):
        btpa = b.T @ p @ a
        p_next = q + a.T @ p @ a - btpa.T @ solve(r + b.T @ p @ b, btpa, assume_a="pos")
        p_next = 0.5 * (p_next + p_next.T)
        if not np.all(np.isfinite(p_next)):
            break
        delta = float(np.max(np.abs(p_next - p)))
        p = p_next
        if delta <= tol * (1.0 + float(np.max(np.abs(p)))):
            k = -solve(r + b.T @ p @ b, b.T @ p @ a, assume_a="pos")
            rho = float(np.max(np.abs(np.linalg.eigvals(a + b @ k))))
            if rho >= 1.0:
                raise ConfigError(f"Riccati gain does not stabilise the system (spectral radius {rho:.6f})")
            logger.debug("Riccati iteration converged in %d steps (rho=%.4f)", it, rho)
            return k, p
    raise ConfigError("Riccati iteration did not converge; (A, B) is not stabilisable with these weights")
