"""Exact decomposition of lattice fluxes into weighted simple loops and paths."""
from .coarea import decompose_divfree, verify_decomposition
from .flows import cycle_acyclic_split, decompose_general
from .grid import CellField, CurveSuperposition, EdgeFlux, GridSpec, LatticeCurve, perp_gradient

__all__ = [
    "CellField",
    "CurveSuperposition",
    "EdgeFlux",
    "GridSpec",
    "LatticeCurve",
    "cycle_acyclic_split",
    "decompose_divfree",
    "decompose_general",
    "perp_gradient",
    "verify_decomposition",
]
