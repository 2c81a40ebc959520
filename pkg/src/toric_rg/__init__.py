"""Renormalisation decoder for the toric code."""

__version__ = "0.1.0"

from ._backend import NAME as BACKEND  # noqa: E402
from .errors import (  # noqa: E402
    ContractViolation,
    InvalidSyndrome,
    NonCycleInput,
    NotInSublattice,
    ParseError,
    SearchBudgetExceeded,
    ToricRGError,
    TraceMismatch,
)
from .lattice import (  # noqa: E402
    EdgeId,
    EdgeSet,
    HomologyClass,
    SyndromeSet,
    TorusLevel,
    VertexCoord,
    homology_class,
    in_sublattice,
    syndrome,
    torus_distance,
)
from .decoder import DecodeTrace, decode, decode_with_trace, reduce_stage  # noqa: E402

__all__ = [
    "BACKEND",
    "ContractViolation",
    "DecodeTrace",
    "EdgeId",
    "EdgeSet",
    "HomologyClass",
    "InvalidSyndrome",
    "NonCycleInput",
    "NotInSublattice",
    "ParseError",
    "SearchBudgetExceeded",
    "SyndromeSet",
    "ToricRGError",
    "TorusLevel",
    "TraceMismatch",
    "VertexCoord",
    "__version__",
    "decode",
    "decode_with_trace",
    "homology_class",
    "in_sublattice",
    "reduce_stage",
    "syndrome",
    "torus_distance",
]
