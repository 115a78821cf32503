# mogpdr/conic/__init__.py
from mogpdr.conic.program import Affine, ConicBuilder, ConicProgram, dump_program, read_program
from mogpdr.conic.solver import ConicSolution, SolverStatus, solve_socp

__all__ = [
    "Affine",
    "ConicBuilder",
    "ConicProgram",
    "ConicSolution",
    "SolverStatus",
    "dump_program",
    "read_program",
    "solve_socp",
]
