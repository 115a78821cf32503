# mogpdr/drcvar/__init__.py
from mogpdr.drcvar.ambiguity import (
    AmbiguityComponent,
    AmbiguitySet,
    TighteningOffsets,
    ambiguity_from_prediction,
    cvar_empirical,
    random_ambiguity_set,
)
from mogpdr.drcvar.oracle import OracleComparison, compare_instance, lp_primal_oracle, relative_gap
from mogpdr.drcvar.socp import build_cvar_program, build_offsets, worst_case_cvar_offset

__all__ = [
    "AmbiguityComponent",
    "AmbiguitySet",
    "OracleComparison",
    "TighteningOffsets",
    "ambiguity_from_prediction",
    "build_cvar_program",
    "build_offsets",
    "compare_instance",
    "cvar_empirical",
    "lp_primal_oracle",
    "random_ambiguity_set",
    "relative_gap",
    "worst_case_cvar_offset",
]
