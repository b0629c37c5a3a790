"""A 5k-vertex kernel for P2-packing, with exact solving and lifting."""

from .errors import (
    InvariantViolation,
    NotSimpleError,
    OracleLimitError,
    P2KernelError,
    ParseError,
    TwoPathsError,
    UnknownVertexError,
)
from .graph import Graph, find_p2, is_p2
from .kernelize import KERNEL, TRIVIAL_NO, TRIVIAL_YES, KernelResult, kernelize, lift_solution
from .matching import AuxBipartite, Matching, Saturating, Violating, hopcroft_karp, saturate_or_violate
from .packing import P2Packing, exact_opt, greedy_maximal_packing, has_packing, verify_packing
from .units import Kind, Unit, UnitPartition, classify_unit

__all__ = [
    "AuxBipartite",
    "Graph",
    "InvariantViolation",
    "KERNEL",
    "KernelResult",
    "Kind",
    "Matching",
    "NotSimpleError",
    "OracleLimitError",
    "P2KernelError",
    "P2Packing",
    "ParseError",
    "Saturating",
    "TRIVIAL_NO",
    "TRIVIAL_YES",
    "TwoPathsError",
    "Unit",
    "UnitPartition",
    "UnknownVertexError",
    "Violating",
    "classify_unit",
    "exact_opt",
    "find_p2",
    "greedy_maximal_packing",
    "has_packing",
    "hopcroft_karp",
    "is_p2",
    "kernelize",
    "lift_solution",
    "saturate_or_violate",
    "verify_packing",
]
