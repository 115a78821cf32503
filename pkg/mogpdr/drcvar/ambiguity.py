# mogpdr/drcvar/ambiguity.py
"""Moment ambiguity sets built from mixture predictions."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from mogpdr.errors import AmbiguitySetError
from mogpdr.geometry.sets import Box
from mogpdr.mogp.model import MixturePrediction

__all__ = [
    "AmbiguityComponent",
    "AmbiguitySet",
    "TighteningOffsets",
    "cvar_empirical",
    "ambiguity_from_prediction",
    "random_ambiguity_set",
    "WEIGHT_TOL",
]

WEIGHT_TOL = 1e-12
_MEAN_TOL = 1e-12


@dataclass(frozen=True)
class AmbiguityComponent:
    """{P on [lower, upper] : E[w] = mean, E[(w - mean)^2] <= variance}, mixed with weight."""

    weight: float
    mean: float
    variance: float
    lower: float
    upper: float

    def problems(self) -> list[str]:
        out = []
        if self.weight < 0.0:
            out.append(f"negative weight {self.weight}")
        if self.variance < 0.0:
            out.append(f"negative variance {self.variance}")
        if self.lower > self.upper:
            out.append(f"crossed support [{self.lower}, {self.upper}]")
        elif not self.lower - _MEAN_TOL <= self.mean <= self.upper + _MEAN_TOL:
            out.append(f"mean {self.mean} outside support [{self.lower}, {self.upper}]")
        return out

    def mirrored(self) -> AmbiguityComponent:
        """The same set for -w."""
        return AmbiguityComponent(self.weight, -self.mean, self.variance, -self.upper, -self.lower)

    @property
    def second_moment(self) -> float:
        return self.variance + self.mean**2


@dataclass(frozen=True)
class AmbiguitySet:
    components: tuple[AmbiguityComponent, ...]
    strict: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise AmbiguitySetError("ambiguity set needs at least one component")
        if not self.strict:
            return
        for j, c in enumerate(self.components):
            issues = c.problems()
            if issues:
                raise AmbiguitySetError(f"component {j}: " + "; ".join(issues))
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise AmbiguitySetError(f"component weights sum to {total!r}, expected 1")

    def mirrored(self) -> AmbiguitySet:
        return AmbiguitySet(tuple(c.mirrored() for c in self.components), strict=self.strict)

    def active(self) -> tuple[AmbiguityComponent, ...]:
        return tuple(c for c in self.components if c.weight > 0.0)

    @property
    def support_bounds(self) -> tuple[float, float]:
        return min(c.lower for c in self.components), max(c.upper for c in self.components)


@dataclass(frozen=True, eq=False)
class TighteningOffsets:
    """eta_lower shifts the lower state bound up, eta_upper shifts the upper bound down."""

    eta_lower: np.ndarray
    eta_upper: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.eta_lower, dtype=float)
        up = np.asarray(self.eta_upper, dtype=float)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
            raise AmbiguitySetError("tightening offsets must be finite")
        object.__setattr__(self, "eta_lower", lo)
        object.__setattr__(self, "eta_upper", up)

    @classmethod
    def zeros(cls, n: int) -> TighteningOffsets:
        return cls(np.zeros(n), np.zeros(n))


def cvar_empirical(samples: Sequence[float] | np.ndarray, eps: float) -> float:
    """Exact CVaR_eps of an empirical distribution (mean of the worst eps-fraction)."""
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    x = np.sort(np.asarray(samples, dtype=float).reshape(-1))[::-1]
    if x.size == 0:
        raise ValueError("cvar_empirical needs at least one sample")
    k = eps * x.size
    if abs(k - round(k)) < 1e-9:
        k = float(round(k))
    whole = int(np.floor(k))
    total = float(np.sum(x[:whole]))
    if whole < x.size:
        total += (k - whole) * x[whole]
    return total / k


def ambiguity_from_prediction(pred: MixturePrediction, dim: int, support: Box) -> AmbiguitySet:
    lo, up = float(support.lower[dim]), float(support.upper[dim])
    comps = [
        AmbiguityComponent(c.weight, min(max(c.mean, lo), up), max(c.variance, 0.0), lo, up)
        for c in pred.components[dim]
    ]
    total = sum(c.weight for c in comps)
    if total > 0.0 and abs(total - 1.0) > WEIGHT_TOL:
        comps = [AmbiguityComponent(c.weight / total, c.mean, c.variance, lo, up) for c in comps]
    return AmbiguitySet(tuple(comps))


def random_ambiguity_set(
    rng: np.random.Generator,
    max_components: int = 4,
    bound: float = 1.0,
    min_width: float = 0.05,
) -> AmbiguitySet:
    """Random valid instance with supports inside [-bound, bound]."""
    m = int(rng.integers(1, max_components + 1))
    weights = rng.dirichlet(np.ones(m))
    weights = weights / weights.sum()
    comps = []
    for w in weights:
        a, b = np.sort(rng.uniform(-bound, bound, size=2))
        if b - a < min_width:
            mid = np.clip(0.5 * (a + b), -bound + min_width / 2, bound - min_width / 2)
            a, b = mid - min_width / 2, mid + min_width / 2
        mu = float(rng.uniform(a, b))
        max_var = (mu - a) * (b - mu)
        # occasionally exceed the largest variance the interval allows
        var = float(rng.uniform(0.0, 1.2 * max_var))
        comps.append(AmbiguityComponent(float(w), mu, var, float(a), float(b)))
    return AmbiguitySet(tuple(comps))
