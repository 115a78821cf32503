# mogpdr/geometry/invariant.py
"""Robust and nominal invariant sets for the tube construction."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from mogpdr.errors import EmptySetError, InvariantSetError
from mogpdr.geometry.sets import DEDUP_TOL, Box, Polytope, as_polytope

logger = logging.getLogger(__name__)

__all__ = [
    "ClosedLoopMatrix",
    "TerminalSetResult",
    "mrpi_approx",
    "terminal_set",
    "MRPI_EPS",
    "MRPI_MAX_ITER",
    "TERMINAL_MAX_ITER",
]

MRPI_EPS = 1e-2
MRPI_MAX_ITER = 1000
TERMINAL_MAX_ITER = 200


@dataclass(frozen=True, eq=False)
class ClosedLoopMatrix:
    a_cl: np.ndarray
    spectral_radius: float

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.asarray(self.a_cl, dtype=float)).copy()
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"closed-loop matrix must be square, got {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "a_cl", a)

    @classmethod
    def from_matrix(cls, a_cl: np.ndarray) -> ClosedLoopMatrix:
        a = np.atleast_2d(np.asarray(a_cl, dtype=float))
        rho = float(np.max(np.abs(np.linalg.eigvals(a)))) if a.size else 0.0
        return cls(a, rho)

    @classmethod
    def from_gain(cls, a: np.ndarray, b: np.ndarray, k: np.ndarray) -> ClosedLoopMatrix:
        return cls.from_matrix(np.asarray(a, dtype=float) + np.asarray(b, dtype=float) @ np.asarray(k, dtype=float))

    @property
    def dim(self) -> int:
        return int(self.a_cl.shape[0])

    @property
    def is_stable(self) -> bool:
        return self.spectral_radius < 1.0


@dataclass(frozen=True)
class TerminalSetResult:
    polytope: Polytope
    converged: bool
    iterations: int


# ---- mRPI outer approximation ----


def _alpha(a_pow: np.ndarray, w: Box) -> float:
    """Smallest alpha with a_pow W inside alpha W, for a box W containing the origin."""
    alpha = 0.0
    for i in range(w.dim):
        for sign, g in ((1.0, w.upper[i]), (-1.0, -w.lower[i])):
            f = np.zeros(w.dim)
            f[i] = sign
            num = w.support(a_pow.T @ f)
            if g <= DEDUP_TOL:
                if num > DEDUP_TOL:
                    return np.inf
                continue
            alpha = max(alpha, num / g)
    return alpha


def _template(a_cl: np.ndarray, base: np.ndarray, depth: int) -> np.ndarray:
    rows = []
    cur = base
    for _ in range(depth + 1):
        rows.append(cur)
        cur = cur @ a_cl
    dirs = np.vstack(rows)
    norms = np.linalg.norm(dirs, axis=1)
    dirs = dirs[norms > DEDUP_TOL] / norms[norms > DEDUP_TOL, None]
    rounded = np.round(dirs / DEDUP_TOL) * DEDUP_TOL
    _, idx = np.unique(rounded, axis=0, return_index=True)
    return dirs[np.sort(idx)]


def _finite_sum_support(powers: list[np.ndarray], w: Box, d: np.ndarray) -> float:
    return float(sum(w.support(p.T @ d) for p in powers))


def mrpi_approx(
    a_cl: ClosedLoopMatrix,
    w: Box,
    eps: float = MRPI_EPS,
    extra_directions: np.ndarray | None = None,
    max_iter: int = MRPI_MAX_ITER,
) -> Polytope:
    """Outer epsilon-approximation of the minimal robust positively invariant set.

    Uses the scaled finite sum (1 - alpha)^-1 (W + A W + ... + A^{s-1} W) where
    A^s W lies in alpha W with alpha <= eps. Facet normals come from the template
    {(A^T)^k d : d in +-e_i and extra_directions}; offsets are the exact supports
    of the scaled sum. The result is then certified facet-wise and, if a residual
    remains on the deepest template level, inflated until A Z + W lies in Z.
    """
    if eps <= 0:
        raise ValueError("mrpi eps must be positive")
    if w.dim != a_cl.dim:
        raise ValueError(f"disturbance set has dim {w.dim}, closed loop has dim {a_cl.dim}")
    if not a_cl.is_stable:
        raise InvariantSetError(f"closed loop is not Schur stable (spectral radius {a_cl.spectral_radius:.6f})")
    if not w.contains(np.zeros(w.dim)):
        raise InvariantSetError("disturbance support must contain the origin")

    n = a_cl.dim
    if np.all(w.lower == 0.0) and np.all(w.upper == 0.0):
        return Box(np.zeros(n), np.zeros(n)).to_polytope()

    a = a_cl.a_cl
    powers = [np.eye(n)]
    a_pow = a.copy()
    s = 1
    alpha = _alpha(a_pow, w)
    while alpha > eps:
        if s >= max_iter:
            raise InvariantSetError(
                f"mRPI approximation did not reach alpha <= {eps} within {max_iter} terms "
                f"(spectral radius {a_cl.spectral_radius:.6f})"
            )
        powers.append(a_pow)
        a_pow = a_pow @ a
        s += 1
        alpha = _alpha(a_pow, w)
    scale = 1.0 / (1.0 - alpha)
    logger.info("mRPI: s=%d alpha=%.3e (spectral radius %.4f)", s, alpha, a_cl.spectral_radius)

    eye = np.eye(n)
    base = np.vstack([eye, -eye])
    if extra_directions is not None and np.size(extra_directions):
        extra = np.atleast_2d(np.asarray(extra_directions, dtype=float))
        base = np.vstack([base, extra, -extra])

    depth = s
    while True:
        dirs = _template(a, base, depth)
        offsets = np.array([scale * _finite_sum_support(powers, w, d) for d in dirs])
        z = Polytope(dirs, offsets)
        theta = _invariance_inflation(z, a, w)
        if np.isfinite(theta) and theta <= 1.0 + eps:
            break
        if depth >= max_iter:
            if not np.isfinite(theta):
                raise InvariantSetError("could not certify robust invariance of the mRPI approximation")
            break
        depth *= 2
    if theta > 1.0:
        logger.info("mRPI: inflating by %.6f to certify invariance (template depth %d)", theta, depth)
        z = z.scaled(theta)
    return z


def _invariance_inflation(z: Polytope, a: np.ndarray, w: Box) -> float:
    """Smallest theta >= 1 with A (theta Z) + W inside theta Z (Z given facet-wise)."""
    theta = 1.0
    for d, h in zip(z.normals, z.offsets, strict=True):
        hw = w.support(d)
        hz = z.support(a.T @ d)
        gap = h - hz
        if hw <= DEDUP_TOL * (1.0 + abs(h)):
            if gap < -DEDUP_TOL * (1.0 + abs(h)):
                return np.inf
            continue
        if gap <= 0.0:
            return np.inf
        theta = max(theta, hw / gap)
    return theta


# ---- Maximal positively invariant terminal set ----


def terminal_set(
    a_cl: ClosedLoopMatrix,
    k_gain: np.ndarray,
    x_tight: Polytope | Box,
    u_tight: Polytope | Box,
    max_iter: int = TERMINAL_MAX_ITER,
    tol: float = DEDUP_TOL,
) -> TerminalSetResult:
    """Maximal positively invariant set of s+ = A_cl s inside x_tight with K s in u_tight."""
    xp = as_polytope(x_tight)
    up = as_polytope(u_tight)
    if xp.is_empty():
        raise EmptySetError("X (-) Z", "terminal set needs a nonempty tightened state set")
    if up.is_empty():
        raise EmptySetError("U (-) KZ", "terminal set needs a nonempty tightened input set")

    k = np.atleast_2d(np.asarray(k_gain, dtype=float))
    a = a_cl.a_cl
    current = xp.intersect(up.linear_preimage(k)).remove_redundant(tol)
    for it in range(1, max_iter + 1):
        candidate = current.normals @ a
        new_rows = [
            i
            for i, row in enumerate(candidate)
            if current.support(row) > current.offsets[i] + tol
        ]
        if not new_rows:
            logger.info("terminal set converged after %d iterations (%d facets)", it, current.n_facets)
            return TerminalSetResult(current, True, it)
        grown = Polytope(
            np.vstack([current.normals, candidate[new_rows]]),
            np.concatenate([current.offsets, current.offsets[new_rows]]),
        )
        current = grown.remove_redundant(tol)
        if current.empty:
            logger.warning("terminal set became empty after %d iterations", it)
            return TerminalSetResult(current, False, it)
    logger.warning("terminal set iteration hit the cap of %d without converging", max_iter)
    return TerminalSetResult(current, False, max_iter)
