# mogpdr/mpc/models.py
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mogpdr.conic.solver import SolverStatus
from mogpdr.drcvar.ambiguity import TighteningOffsets
from mogpdr.geometry.invariant import MRPI_EPS, ClosedLoopMatrix, TerminalSetResult
from mogpdr.geometry.sets import Box, Polytope, as_polytope
from mogpdr.mogp.model import MoGPModel

__all__ = [
    "SystemModel",
    "MPCConfig",
    "ControllerKind",
    "ControllerState",
    "StepSolution",
]


@dataclass(frozen=True, eq=False)
class SystemModel:
    """x+ = a x + b u + w(x), x in state_box (in probability), u in input_set (hard), w in support."""

    a: np.ndarray
    b: np.ndarray
    state_box: Box
    input_set: Polytope
    support: Box

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        b = np.asarray(self.b, dtype=float)
        b = b.reshape(a.shape[0], -1)
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"A must be square, got {a.shape}")
        n, m = b.shape
        u = as_polytope(self.input_set)
        if self.state_box.dim != n or self.support.dim != n or u.dim != m:
            raise ValueError(
                f"set dimensions (X {self.state_box.dim}, W {self.support.dim}, U {u.dim}) "
                f"do not match n={n}, m={m}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "input_set", u)

    @property
    def n(self) -> int:
        return int(self.a.shape[0])

    @property
    def m(self) -> int:
        return int(self.b.shape[1])

    def step(self, x: np.ndarray, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        return self.a @ x + self.b @ u + w


def _is_pd(m: np.ndarray) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1] or not np.allclose(m, m.T, atol=1e-12):
        return False
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError:
        return False
    return True


class MPCConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    horizon: int = Field(default=10, ge=2)
    q: list[list[float]]
    r: list[list[float]]
    p: list[list[float]] | None = None  # None -> Riccati solution
    risk: float = Field(default=0.2, gt=0, lt=1)
    mrpi_eps: float = Field(default=MRPI_EPS, gt=0)
    solver_tol: float = Field(default=1e-8, gt=0)
    constraint_backoff: float = Field(default=1e-7, ge=0)

    @model_validator(mode="after")
    def _weights_pd(self) -> MPCConfig:
        for name in ("q", "r", "p"):
            value = getattr(self, name)
            if value is not None and not _is_pd(np.asarray(value, dtype=float)):
                raise ValueError(f"weight matrix {name.upper()} must be symmetric positive definite")
        return self

    @property
    def q_matrix(self) -> np.ndarray:
        return np.asarray(self.q, dtype=float)

    @property
    def r_matrix(self) -> np.ndarray:
        return np.asarray(self.r, dtype=float)

    @property
    def p_matrix(self) -> np.ndarray | None:
        return None if self.p is None else np.asarray(self.p, dtype=float)


class ControllerKind(str, Enum):
    MOGP_DR = "mogp-dr"
    GP_DR = "gp-dr"
    ROBUST_TUBE = "robust-tube"

    @property
    def uses_model(self) -> bool:
        return self is not ControllerKind.ROBUST_TUBE


@dataclass(frozen=True, eq=False)
class ControllerState:
    system: SystemModel
    config: MPCConfig
    kind: ControllerKind
    k_gain: np.ndarray
    p_terminal: np.ndarray
    closed_loop: ClosedLoopMatrix
    z_set: Polytope
    z_trivial: bool
    x_tight: Polytope
    u_tight: Polytope
    terminal: TerminalSetResult
    model: MoGPModel | None = None

    @property
    def horizon(self) -> int:
        return self.config.horizon


@dataclass(frozen=True, eq=False)
class StepSolution:
    status: SolverStatus
    s: np.ndarray | None  # (N+1, n) nominal states
    v: np.ndarray | None  # (N, m) nominal inputs
    u: np.ndarray | None  # applied input
    offsets: TighteningOffsets | None
    objective: float
    solve_time: float = 0.0

    @property
    def s0(self) -> np.ndarray | None:
        return None if self.s is None else self.s[0]

    @property
    def ok(self) -> bool:
        return self.status is SolverStatus.OPTIMAL
