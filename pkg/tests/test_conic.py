import numpy as np
import pytest

from mogpdr.conic.program import Affine, ConicBuilder, dump_program, read_program
from mogpdr.conic.solver import SolverStatus, residuals, solve_socp


def _unit_disc_program():
    # minimize x + y  s.t.  ||(x, y)|| <= 1
    b = ConicBuilder()
    xy = b.variables("xy", 2)
    t = b.variable("t")
    b.equal(Affine.var(t), 1.0)
    b.soc(t, xy)
    b.minimize(Affine.dot([1.0, 1.0], xy))
    return b.build()


def test_socp_optimum_on_unit_disc():
    p = _unit_disc_program()
    sol = solve_socp(p)
    assert sol.status is SolverStatus.OPTIMAL
    assert sol.objective == pytest.approx(-np.sqrt(2.0), abs=1e-6)
    assert np.allclose(p.block(sol.x, "xy"), [-1 / np.sqrt(2.0)] * 2, atol=1e-6)
    eq, viol = residuals(p, sol.x)
    assert eq <= 1e-7 and viol <= 1e-7


def test_affine_cone_and_inequalities():
    # minimize t  s.t. ||(x - 3, 4)|| <= t, x <= 1  ->  x = 1, t = sqrt(4 + 16)
    b = ConicBuilder()
    x = b.variable("x")
    t = b.variable("t")
    b.less_equal(Affine.var(x), 1.0)
    b.soc_affine(Affine.var(t), [Affine.var(x) - 3.0, Affine.constant(4.0)])
    b.minimize(Affine.var(t))
    p = b.build()
    sol = solve_socp(p)
    assert sol.ok
    assert sol.objective == pytest.approx(np.sqrt(20.0), abs=1e-6)
    assert p.block(sol.x, "x")[0] == pytest.approx(1.0, abs=1e-6)


def test_infeasible_program():
    b = ConicBuilder()
    x = b.variable("x", nonneg=True)
    b.less_equal(Affine.var(x), -1.0)
    b.minimize(Affine.var(x))
    sol = solve_socp(b.build())
    assert sol.status is SolverStatus.INFEASIBLE
    assert not sol.ok and sol.x is None


def test_unbounded_program():
    b = ConicBuilder()
    x = b.variable("x")
    b.less_equal(Affine.var(x), 5.0)
    b.minimize(Affine.var(x))
    assert solve_socp(b.build()).status is SolverStatus.UNBOUNDED


def test_text_dump_reproduces_the_program(tmp_path):
    p = _unit_disc_program()
    path = tmp_path / "disc.txt"
    dump_program(p, path)
    q = read_program(path)
    assert q.n_vars == p.n_vars and q.n_eq == p.n_eq
    assert solve_socp(q).objective == pytest.approx(solve_socp(p).objective, abs=1e-9)


def test_text_dump_writes_plain_numbers(tmp_path):
    b = ConicBuilder()
    x = b.variables("x", 2)
    b.equal(Affine.dot(np.array([0.5, -2.25]), x), np.float64(1.0))
    b.minimize(Affine.dot(np.array([1.0, 3.0]), x))
    p = b.build()
    path = tmp_path / "plain.txt"
    dump_program(p, path)
    text = path.read_text(encoding="utf-8")
    assert "np." not in text and "float64" not in text
    for line in text.splitlines():
        if line[0].isdigit() or line[0] == "-":
            [float(tok) for tok in line.split()]
    q = read_program(path)
    assert np.array_equal(q.c, p.c)
    assert np.array_equal(q.a_eq.toarray(), p.a_eq.toarray())


def test_affine_arithmetic():
    e = Affine.var(0, 2.0) + Affine.var(1) * 3.0 - 1.5
    assert e.terms == {0: 2.0, 1: 3.0}
    assert e.const == -1.5
    f = 1.0 - e
    assert f.terms == {0: -2.0, 1: -3.0} and f.const == 2.5
