# mogpdr/geometry/sets.py
"""Axis-aligned boxes and H-polytopes with support-function arithmetic.

Every set here is immutable. Emptiness is carried as an explicit ``empty``
flag so callers branch on it instead of catching exceptions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

logger = logging.getLogger(__name__)

__all__ = [
    "Box",
    "Polytope",
    "as_polytope",
    "support",
    "minkowski_sum_box",
    "pontryagin_diff",
    "DEDUP_TOL",
]

DEDUP_TOL = 1e-9
_RADIUS_CAP = 1e6


def _lp_max(direction: np.ndarray, a_ub: np.ndarray, b_ub: np.ndarray) -> float:
    """sup direction·x over {x : a_ub x <= b_ub}; +inf if unbounded, -inf if infeasible."""
    if a_ub.shape[0] == 0:
        return 0.0 if not np.any(direction) else np.inf
    res = linprog(-direction, A_ub=a_ub, b_ub=b_ub, bounds=(None, None), method="highs")
    if res.status == 0:
        return float(-res.fun)
    if res.status == 2:
        return -np.inf
    if res.status == 3:
        return np.inf
    raise RuntimeError(f"support LP failed: {res.message}")


# ---- Box ----


@dataclass(frozen=True, eq=False)
class Box:
    lower: np.ndarray
    upper: np.ndarray
    empty: bool = False

    def __post_init__(self) -> None:
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        up = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lo.ndim != 1 or lo.shape != up.shape or lo.size == 0:
            raise ValueError(f"box bounds must be equal-length nonempty vectors, got {lo.shape} and {up.shape}")
        if not self.empty and np.any(lo > up):
            raise ValueError(f"crossed box bounds {lo} > {up}; use empty=True for empty boxes")
        lo.setflags(write=False)
        up.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", up)

    @classmethod
    def symmetric(cls, radius: np.ndarray | list[float] | float, dim: int | None = None) -> Box:
        r = np.atleast_1d(np.asarray(radius, dtype=float))
        if dim is not None and r.size == 1:
            r = np.full(dim, r[0])
        return cls(-r, r)

    @classmethod
    def point(cls, x: np.ndarray | list[float]) -> Box:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return cls(x, x)

    @property
    def dim(self) -> int:
        return int(self.lower.size)

    @property
    def is_point(self) -> bool:
        return not self.empty and bool(np.all(self.lower == self.upper))

    def support(self, direction: np.ndarray) -> float:
        if self.empty:
            return -np.inf
        d = np.asarray(direction, dtype=float)
        return float(np.sum(np.where(d >= 0.0, d * self.upper, d * self.lower)))

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self.empty:
            return False
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def to_polytope(self) -> Polytope:
        n = self.dim
        eye = np.eye(n)
        return Polytope(np.vstack([eye, -eye]), np.concatenate([self.upper, -self.lower]), empty=self.empty)

    def __repr__(self) -> str:
        if self.empty:
            return f"Box(empty, dim={self.dim})"
        return f"Box(lower={self.lower.tolist()}, upper={self.upper.tolist()})"


# ---- Polytope ----


@dataclass(frozen=True, eq=False)
class Polytope:
    """The set {s : normals @ s <= offsets}."""

    normals: np.ndarray
    offsets: np.ndarray
    empty: bool = False
    _dim: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        h_mat = np.asarray(self.normals, dtype=float)
        if h_mat.ndim == 1:
            h_mat = h_mat.reshape(1, -1)
        h_vec = np.atleast_1d(np.asarray(self.offsets, dtype=float)).reshape(-1)
        if h_mat.shape[0] != h_vec.size:
            raise ValueError(f"{h_mat.shape[0]} facet normals but {h_vec.size} offsets")
        dim = h_mat.shape[1] if h_mat.shape[1] else self._dim
        h_mat = h_mat.copy()
        h_vec = h_vec.copy()
        h_mat.setflags(write=False)
        h_vec.setflags(write=False)
        object.__setattr__(self, "normals", h_mat)
        object.__setattr__(self, "offsets", h_vec)
        object.__setattr__(self, "_dim", int(dim))

    @classmethod
    def from_box(cls, box: Box) -> Polytope:
        return box.to_polytope()

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n_facets(self) -> int:
        return int(self.offsets.size)

    def support(self, direction: np.ndarray) -> float:
        if self.empty:
            return -np.inf
        return _lp_max(np.asarray(direction, dtype=float), self.normals, self.offsets)

    def contains(self, x: np.ndarray, tol: float = 1e-9) -> bool:
        if self.empty:
            return False
        return bool(np.all(self.normals @ np.asarray(x, dtype=float) <= self.offsets + tol))

    def intersect(self, other: Polytope | Box) -> Polytope:
        other = as_polytope(other)
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return Polytope(
            np.vstack([self.normals, other.normals]),
            np.concatenate([self.offsets, other.offsets]),
            empty=self.empty or other.empty,
        )

    def linear_preimage(self, m: np.ndarray) -> Polytope:
        """{x : m x in self}."""
        m = np.atleast_2d(np.asarray(m, dtype=float))
        return Polytope(self.normals @ m, self.offsets, empty=self.empty, _dim=m.shape[1])

    def scaled(self, factor: float) -> Polytope:
        return Polytope(self.normals, factor * self.offsets, empty=self.empty)

    def normalized(self) -> Polytope:
        """Unit-norm rows, zero rows dropped (a zero row with negative offset empties the set)."""
        norms = np.linalg.norm(self.normals, axis=1)
        zero = norms <= DEDUP_TOL
        empty = self.empty or bool(np.any(self.offsets[zero] < -DEDUP_TOL))
        keep = ~zero
        return Polytope(
            self.normals[keep] / norms[keep, None], self.offsets[keep] / norms[keep], empty=empty, _dim=self.dim
        )

    def deduplicated(self) -> Polytope:
        """Normalize, then merge parallel facets keeping the tightest offset."""
        p = self.normalized()
        if p.n_facets == 0:
            return p
        rounded = np.round(p.normals / DEDUP_TOL) * DEDUP_TOL
        _, inverse = np.unique(rounded, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        keep: dict[int, int] = {}
        for i, g in enumerate(inverse):
            j = keep.get(int(g))
            if j is None or p.offsets[i] < p.offsets[j]:
                keep[int(g)] = i
        idx = np.array(sorted(keep.values()), dtype=int)
        return Polytope(p.normals[idx], p.offsets[idx], empty=p.empty, _dim=p.dim)

    def remove_redundant(self, tol: float = DEDUP_TOL) -> Polytope:
        """Drop facets implied by the others, one support LP per facet."""
        p = self.deduplicated()
        if p.empty or p.n_facets <= 1:
            return p
        keep = np.ones(p.n_facets, dtype=bool)
        for i in range(p.n_facets):
            keep[i] = False
            a_ub = np.vstack([p.normals[keep], p.normals[i]])
            b_ub = np.concatenate([p.offsets[keep], [p.offsets[i] + 1.0]])
            value = _lp_max(p.normals[i], a_ub, b_ub)
            if value == -np.inf:
                # whole set is empty
                return Polytope(p.normals, p.offsets, empty=True, _dim=p.dim)
            if value > p.offsets[i] + tol:
                keep[i] = True
        return Polytope(p.normals[keep], p.offsets[keep], empty=p.empty, _dim=p.dim)

    def chebyshev_radius(self) -> float:
        """Radius of the largest inscribed ball; negative means the set is empty."""
        p = self.normalized()
        if p.empty:
            return -np.inf
        if p.n_facets == 0:
            return _RADIUS_CAP
        n = p.dim
        c = np.zeros(n + 1)
        c[-1] = -1.0
        a_ub = np.hstack([p.normals, np.ones((p.n_facets, 1))])
        bounds = [(None, None)] * n + [(None, _RADIUS_CAP)]
        res = linprog(c, A_ub=a_ub, b_ub=p.offsets, bounds=bounds, method="highs")
        if res.status != 0:
            return -np.inf
        return float(res.x[-1])

    def is_empty(self, tol: float = DEDUP_TOL) -> bool:
        return self.empty or self.chebyshev_radius() < -tol

    def bounding_box(self) -> Box:
        if self.is_empty():
            return Box(np.zeros(self.dim), np.zeros(self.dim), empty=True)
        eye = np.eye(self.dim)
        upper = np.array([self.support(e) for e in eye])
        lower = np.array([-self.support(-e) for e in eye])
        return Box(lower, np.maximum(upper, lower))

    def is_subset_of(self, other: Polytope | Box, tol: float = 1e-7) -> bool:
        if self.empty:
            return True
        other = as_polytope(other)
        return all(self.support(hi) <= bi + tol for hi, bi in zip(other.normals, other.offsets, strict=True))

    def __repr__(self) -> str:
        return f"Polytope(dim={self.dim}, facets={self.n_facets}, empty={self.empty})"


def as_polytope(s: Polytope | Box) -> Polytope:
    return s.to_polytope() if isinstance(s, Box) else s


def support(s: Polytope | Box, direction: np.ndarray) -> float:
    return s.support(direction)


# ---- Set arithmetic ----


def minkowski_sum_box(a: Box, b: Box) -> Box:
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.empty or b.empty:
        return Box(np.zeros(a.dim), np.zeros(a.dim), empty=True)
    return Box(a.lower + b.lower, a.upper + b.upper)


def pontryagin_diff(x: Box | Polytope, z: Box | Polytope, transform: np.ndarray | None = None) -> Polytope:
    """{s : s + M e in x for all e in z}, M = transform (identity by default).

    Each facet offset h_i shrinks by the support of M z in direction H_i. An empty
    result is flagged, never raised.
    """
    xp = as_polytope(x)
    m = np.eye(z.dim) if transform is None else np.atleast_2d(np.asarray(transform, dtype=float))
    if m.shape != (xp.dim, z.dim):
        raise ValueError(f"cannot subtract a {z.dim}-dim set mapped by {m.shape} from a {xp.dim}-dim set")
    shrink = np.array([z.support(m.T @ hi) for hi in xp.normals])
    if not np.all(np.isfinite(shrink)):
        raise ValueError("pontryagin_diff requires a bounded, nonempty subtrahend")
    out = Polytope(xp.normals, xp.offsets - shrink, empty=xp.empty)
    if not out.empty and out.is_empty():
        logger.debug("Pontryagin difference is empty")
        out = Polytope(out.normals, out.offsets, empty=True)
    return out
