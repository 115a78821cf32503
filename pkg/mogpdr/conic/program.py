# mogpdr/conic/program.py
"""Standard-form conic programs.

    minimize    c @ x
    subject to  A x = b
                x[i] >= 0            for i in nonneg
                ||x[idx]||_2 <= x[t]  for (t, idx) in soc_blocks

Programs are assembled with :class:`ConicBuilder`, which accepts affine
expressions and introduces slack / auxiliary variables as needed.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = ["Affine", "ConicProgram", "ConicBuilder", "dump_program", "read_program"]


@dataclass
class Affine:
    """Sparse affine expression sum(coef * x[i]) + const."""

    terms: dict[int, float] = field(default_factory=dict)
    const: float = 0.0

    @classmethod
    def var(cls, index: int, coef: float = 1.0) -> Affine:
        return cls({int(index): float(coef)})

    @classmethod
    def constant(cls, value: float) -> Affine:
        return cls({}, float(value))

    @classmethod
    def dot(cls, coefs: Iterable[float], indices: Iterable[int], const: float = 0.0) -> Affine:
        out: dict[int, float] = {}
        for a, i in zip(coefs, indices, strict=True):
            if a != 0.0:
                out[int(i)] = out.get(int(i), 0.0) + float(a)
        return cls(out, float(const))

    def __add__(self, other: Affine | float) -> Affine:
        if not isinstance(other, Affine):
            return Affine(dict(self.terms), self.const + float(other))
        terms = dict(self.terms)
        for i, a in other.terms.items():
            terms[i] = terms.get(i, 0.0) + a
        return Affine(terms, self.const + other.const)

    __radd__ = __add__

    def __neg__(self) -> Affine:
        return Affine({i: -a for i, a in self.terms.items()}, -self.const)

    def __sub__(self, other: Affine | float) -> Affine:
        return self + (-other)

    def __rsub__(self, other: float) -> Affine:
        return (-self) + other

    def __mul__(self, k: float) -> Affine:
        k = float(k)
        return Affine({i: k * a for i, a in self.terms.items()}, k * self.const)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ConicProgram:
    c: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    nonneg: np.ndarray
    soc_blocks: tuple[tuple[int, tuple[int, ...]], ...] = ()
    blocks: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.c.size
        if self.a_eq.shape != (self.b_eq.size, n):
            raise ValueError(f"equality matrix {self.a_eq.shape} does not match {self.b_eq.size} rows x {n} vars")
        if self.nonneg.size and (self.nonneg.min() < 0 or self.nonneg.max() >= n):
            raise ValueError("nonnegativity index out of bounds")
        for t, idx in self.soc_blocks:
            if not 0 <= t < n or any(not 0 <= i < n for i in idx):
                raise ValueError(f"second-order cone block ({t}, {idx}) out of bounds")

    @property
    def n_vars(self) -> int:
        return int(self.c.size)

    @property
    def n_eq(self) -> int:
        return int(self.b_eq.size)

    def block(self, x: np.ndarray, name: str) -> np.ndarray:
        return x[self.blocks[name]]


class ConicBuilder:
    def __init__(self) -> None:
        self._n = 0
        self._c: dict[int, float] = {}
        self._rows: list[int] = []
        self._cols: list[int] = []
        self._vals: list[float] = []
        self._rhs: list[float] = []
        self._nonneg: list[int] = []
        self._socs: list[tuple[int, tuple[int, ...]]] = []
        self._blocks: dict[str, np.ndarray] = {}

    # ---- variables ----
    def variables(self, name: str, size: int, nonneg: bool = False) -> np.ndarray:
        idx = np.arange(self._n, self._n + size)
        self._n += size
        if nonneg:
            self._nonneg.extend(idx.tolist())
        if name:
            self._blocks[name] = idx
        return idx

    def variable(self, name: str, nonneg: bool = False) -> int:
        return int(self.variables(name, 1, nonneg)[0])

    # ---- objective ----
    def minimize(self, expr: Affine) -> None:
        for i, a in expr.terms.items():
            self._c[i] = self._c.get(i, 0.0) + a

    # ---- constraints ----
    def equal(self, expr: Affine, rhs: float = 0.0) -> None:
        """expr == rhs."""
        row = len(self._rhs)
        for i, a in expr.terms.items():
            self._rows.append(row)
            self._cols.append(i)
            self._vals.append(a)
        self._rhs.append(float(rhs) - expr.const)

    def less_equal(self, expr: Affine, rhs: float = 0.0) -> int:
        """expr <= rhs via a nonnegative slack; returns the slack index."""
        s = self.variable("", nonneg=True)
        self.equal(expr + Affine.var(s), rhs)
        return s

    def equal_rows(self, matrix: np.ndarray, indices: Sequence[int], rhs: np.ndarray) -> None:
        matrix = np.atleast_2d(matrix)
        for row, b in zip(matrix, np.atleast_1d(rhs), strict=True):
            self.equal(Affine.dot(row, indices), float(b))

    def less_equal_rows(self, matrix: np.ndarray, indices: Sequence[int], rhs: np.ndarray) -> None:
        matrix = np.atleast_2d(matrix)
        for row, b in zip(matrix, np.atleast_1d(rhs), strict=True):
            self.less_equal(Affine.dot(row, indices), float(b))

    def soc(self, t: int, xs: Sequence[int]) -> None:
        """||x[xs]|| <= x[t] on raw variables."""
        self._socs.append((int(t), tuple(int(i) for i in xs)))

    def soc_affine(self, t: Affine, xs: Sequence[Affine]) -> None:
        """||(xs...)|| <= t on affine expressions; auxiliaries carry each expression."""
        t_idx = self._as_variable(t)
        x_idx = [self._as_variable(e) for e in xs]
        self.soc(t_idx, x_idx)

    def _as_variable(self, expr: Affine) -> int:
        if expr.const == 0.0 and len(expr.terms) == 1:
            ((i, a),) = expr.terms.items()
            if a == 1.0:
                return i
        aux = self.variable("")
        self.equal(expr - Affine.var(aux), 0.0)
        return aux

    def build(self) -> ConicProgram:
        n = self._n
        c = np.zeros(n)
        for i, a in self._c.items():
            c[i] = a
        a_eq = sp.csr_matrix((self._vals, (self._rows, self._cols)), shape=(len(self._rhs), n))
        return ConicProgram(
            c=c,
            a_eq=a_eq,
            b_eq=np.asarray(self._rhs, dtype=float),
            nonneg=np.asarray(sorted(set(self._nonneg)), dtype=int),
            soc_blocks=tuple(self._socs),
            blocks=dict(self._blocks),
        )


# ---- Text dump ----
#
# Line-oriented, 1-based indices (matrix-market style), '%' starts a comment:
#   %%ConicProgram 1
#   variables <n>
#   objective <k>          followed by k lines "<i> <c_i>" (nonzeros only)
#   equalities <m> <nnz>   followed by nnz lines "<row> <col> <value>"
#   rhs <m>                followed by m lines "<b_row>"
#   nonneg <k>             followed by k lines "<i>"
#   soc <k>                followed by k lines "<t> <size> <i_1> ... <i_size>"


def dump_program(p: ConicProgram, path: str | Path) -> None:
    coo = p.a_eq.tocoo()
    nz = np.flatnonzero(p.c)
    lines = ["%%ConicProgram 1", f"variables {p.n_vars}", f"objective {nz.size}"]
    lines += [f"{i + 1} {float(p.c[i])!r}" for i in nz]
    lines.append(f"equalities {p.n_eq} {coo.nnz}")
    lines += [f"{r + 1} {c + 1} {float(v)!r}" for r, c, v in zip(coo.row, coo.col, coo.data, strict=True)]
    lines.append(f"rhs {p.n_eq}")
    lines += [repr(float(b)) for b in p.b_eq]
    lines.append(f"nonneg {p.nonneg.size}")
    lines += [str(i + 1) for i in p.nonneg]
    lines.append(f"soc {len(p.soc_blocks)}")
    lines += [" ".join([str(t + 1), str(len(idx))] + [str(i + 1) for i in idx]) for t, idx in p.soc_blocks]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_program(path: str | Path) -> ConicProgram:
    raw = [ln.strip() for ln in Path(path).read_text(encoding="utf-8").splitlines()]
    it = iter(ln for ln in raw if ln and not ln.startswith("%"))

    def header(tag: str) -> list[int]:
        parts = next(it).split()
        if parts[0] != tag:
            raise ValueError(f"expected section '{tag}', got '{parts[0]}'")
        return [int(v) for v in parts[1:]]

    (n,) = header("variables")
    c = np.zeros(n)
    (k,) = header("objective")
    for _ in range(k):
        i, v = next(it).split()
        c[int(i) - 1] = float(v)
    m, nnz = header("equalities")
    rows, cols, vals = [], [], []
    for _ in range(nnz):
        r, col, v = next(it).split()
        rows.append(int(r) - 1)
        cols.append(int(col) - 1)
        vals.append(float(v))
    (m_rhs,) = header("rhs")
    b = np.array([float(next(it)) for _ in range(m_rhs)])
    (k,) = header("nonneg")
    nonneg = np.array([int(next(it)) - 1 for _ in range(k)], dtype=int)
    (k,) = header("soc")
    socs = []
    for _ in range(k):
        parts = [int(v) for v in next(it).split()]
        socs.append((parts[0] - 1, tuple(i - 1 for i in parts[2 : 2 + parts[1]])))
    return ConicProgram(c, sp.csr_matrix((vals, (rows, cols)), shape=(m, n)), b, nonneg, tuple(socs))
