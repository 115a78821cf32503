# mogpdr/geometry/__init__.py
from mogpdr.geometry.invariant import (
    MRPI_EPS,
    ClosedLoopMatrix,
    TerminalSetResult,
    mrpi_approx,
    terminal_set,
)
from mogpdr.geometry.sets import Box, Polytope, as_polytope, minkowski_sum_box, pontryagin_diff

__all__ = [
    "MRPI_EPS",
    "Box",
    "ClosedLoopMatrix",
    "Polytope",
    "TerminalSetResult",
    "as_polytope",
    "minkowski_sum_box",
    "mrpi_approx",
    "pontryagin_diff",
    "terminal_set",
]
