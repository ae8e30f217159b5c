"""loopcalc: intersection forms, loop brackets and cobrackets on star-filled
surfaces, computed two independent ways (per-star formulas and the gate
calculus) that cross-validate each other."""

from loopcalc.algebra import FormalSum, HomotopyClass, TensorSum
from loopcalc.loops import CombinatorialLoop, Transit, compile_word, to_class
from loopcalc.surface import (
    GateRef,
    Region,
    Star,
    StarFilledSurface,
    canonical_surface,
    dual_graph,
    validate_surface,
)

__version__ = "0.1.0"

__all__ = [
    "CombinatorialLoop",
    "FormalSum",
    "GateRef",
    "HomotopyClass",
    "Region",
    "Star",
    "StarFilledSurface",
    "TensorSum",
    "Transit",
    "canonical_surface",
    "compile_word",
    "dual_graph",
    "to_class",
    "validate_surface",
    "__version__",
]
